#include <doctest.h>

#include "support.hpp"

using namespace minimal_bottle;
using testing_support::default_engine;
using testing_support::Gen;

TEST_SUITE("klein") {
  TEST_CASE("canonical representatives") {
    Gen g(51);
    for (int i = 0; i < 2000; ++i) {
      const TorusPoint z = g.edgy_torus();
      const KleinPoint k = project(z);
      CHECK(k.rep.x.in_first_half());
      CHECK(project(involution(z)) == k);
      CHECK((k.rep == z || k.rep == involution(z)));
      CHECK(klein_dist(project(z), project(involution(z))) == 0.0);
    }
    CHECK(project({CirclePoint::half(), CirclePoint::from_double(0.25)}).rep ==
          TorusPoint{CirclePoint{}, CirclePoint::from_double(0.75)});
  }

  TEST_CASE("klein_dist is a metric bounded by the torus metric") {
    Gen g(52);
    for (int i = 0; i < 2000; ++i) {
      const TorusPoint a = g.torus(), b = g.torus(), c = g.torus();
      const double ab = klein_dist(project(a), project(b));
      CHECK(ab <= torus_dist(a, b));
      CHECK(ab == klein_dist(project(b), project(a)));
      CHECK(ab <= klein_dist(project(a), project(c)) + klein_dist(project(c), project(b)) + 1e-15);
    }
  }

  TEST_CASE("S_tilde is well defined") {
    Gen g(53);
    for (int i = 0; i < 500; ++i) {
      const TorusPoint z = g.edgy_torus();
      const KleinPoint via_torus = project(default_engine().s_hat(z));
      CHECK(klein_dist(s_tilde(default_engine(), project(z)), via_torus) <= 1e-9);
      CHECK(klein_dist(project(default_engine().s_hat(involution(z))), via_torus) <= 1e-9);
    }
  }

  TEST_CASE("Klein orbits stay in the canonical domain") {
    const auto orb = klein_orbit(default_engine(), project({CirclePoint::from_double(0.7), CirclePoint::from_double(0.1)}), 300);
    REQUIRE(orb.size() == 301);
    for (const auto& k : orb) CHECK(k.rep.x.to_double() < 0.5);
  }
}
