#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "minimal_bottle/verify.hpp"
#include "support.hpp"

using namespace minimal_bottle;
using testing_support::default_engine;
using testing_support::Gen;

namespace {
const TransportEngine& engine() { return default_engine(); }
const ProfileSpec& spec() { return engine().profiles().spec(); }
}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("truncation must exceed the bisection depth") {
    CHECK_THROWS_AS(TransportEngine(CocycleSpec::liouville_default(), ProfileSpec{}, 52), std::invalid_argument);
    CHECK_NOTHROW(TransportEngine(CocycleSpec::liouville_default(), ProfileSpec{}, 53));
  }

  TEST_CASE("tau endpoints are exact") {
    Gen g(41);
    for (int i = 0; i < 200; ++i) {
      const CirclePoint x = g.edgy_point();
      CHECK(engine().tau(x, 0.0) == Lift::zero());
      CHECK(engine().tau(x, 1.0) == Lift::one());
      CHECK(engine().tau(x, -0.5) == Lift::zero());
    }
    CHECK(engine().tau(spec().x1_star, 0.0) == Lift::zero());
    CHECK(engine().tau(spec().x1_star, 1.0) == Lift::one());
  }

  TEST_CASE("tau inverts the CDF") {
    Gen g(42);
    for (int i = 0; i < 2000; ++i) {
      const FiberCdf f = engine().fiber(g.point());
      const double level = g.unit();
      const Lift t = engine().tau(f, level);
      CHECK(std::abs(f(t).value - level) <= 1e-9);
    }
  }

  TEST_CASE("tau is the lower generalized inverse on atom fibers") {
    const FiberCdf f = engine().fiber(spec().x1_star);
    const Lift star = Lift::from_point(spec().y1_star_point());
    const double lo = f.left_limit(star), hi = f(star).value;
    CHECK(hi - lo == 0.25);
    for (double t : {0.0, 0.01, 0.3, 0.7, 0.99, 1.0}) CHECK(engine().tau(f, lo + t * (hi - lo)) == star);
    CHECK(engine().tau(f, hi + 1e-6) > star);
    CHECK(engine().tau(f, lo - 1e-6) < star);
  }

  TEST_CASE("tau is monotone with slope at most 2") {
    Gen g(43);
    for (int i = 0; i < 20; ++i) {
      const FiberCdf f = engine().fiber(g.point());
      double prev_level = 0.0;
      Lift prev = Lift::zero();
      for (int k = 1; k <= 200; ++k) {
        const double level = k / 201.0;
        const Lift t = engine().tau(f, level);
        CHECK(prev <= t);
        CHECK(t.to_double() - prev.to_double() <= 2.0 * (level - prev_level) + 1e-15);
        prev = t;
        prev_level = level;
      }
    }
  }

  TEST_CASE("T commutes with P") {
    Gen g(44);
    for (int i = 0; i < 1000; ++i) {
      const TorusPoint z = g.edgy_torus();
      CHECK(torus_dist(engine().t_map(involution(z)), involution(engine().t_map(z))) <= 1e-9);
    }
  }

  TEST_CASE("semiconjugacy T S_hat = S T") {
    Gen g(45);
    for (int i = 0; i < 1000; ++i) {
      const TorusPoint z = g.edgy_torus();
      CHECK(torus_dist(engine().t_map(engine().s_hat(z)), engine().base().step(engine().t_map(z))) <= 1e-9);
    }
    // on the collapse fiber both sides land on S(z1*)
    const TorusPoint z{spec().x1_star, CirclePoint::from_double(0.6)};
    const TorusPoint star{spec().x1_star, spec().y1_star_point()};
    CHECK(torus_dist(engine().t_map(engine().s_hat(z)), engine().base().step(star)) <= 1e-9);
  }

  TEST_CASE("S_hat commutes with P, including atom fibers and x = 0") {
    Gen g(46);
    std::vector<TorusPoint> pts;
    for (int i = 0; i < 800; ++i) pts.push_back(g.edgy_torus());
    for (int i = 0; i < 50; ++i) pts.push_back({CirclePoint{}, g.point()});
    for (int k = 0; k < 5; ++k) {
      const CirclePoint x = spec().x1_star - engine().base().alpha().times(k);
      for (int i = 0; i < 20; ++i) pts.push_back({x, g.point()});
    }
    for (const auto& z : pts) {
      CHECK(torus_dist(engine().s_hat(involution(z)), involution(engine().s_hat(z))) <= 1e-9);
    }
  }

  TEST_CASE("S_hat preserves fibers and the fiber order") {
    Gen g(47);
    for (int i = 0; i < 500; ++i) {
      const TorusPoint z = g.torus();
      CHECK(engine().s_hat(z).x == engine().base().rotate(z.x));
    }
    const CirclePoint x = CirclePoint::from_double(0.35);
    double prev = -1.0;
    for (int k = 1; k < 400; ++k) {
      const double level = k / 400.0;
      const double y = engine().s_hat({x, CirclePoint::from_double(level)}).y.to_double();
      if (prev >= 0.0) {
        const double step = std::fmod(y - prev + 1.0, 1.0);
        CHECK(step >= 0.5 / 400 - 1e-12);
      }
      prev = y;
    }
  }

  TEST_CASE("collapse of the atom interval") {
    const FiberCdf f = engine().fiber(spec().x1_star);
    const double y1 = f(Lift::from_point(spec().y1_star_point())).value;
    const TorusPoint top = engine().s_hat({spec().x1_star, CirclePoint::from_double(y1)});
    for (double d : {0.01, 0.05, 0.10, 0.20, 0.24, 0.2499}) {
      CHECK(torus_dist(engine().s_hat({spec().x1_star, CirclePoint::from_double(y1 - d)}), top) <= 1e-9);
    }
    CHECK(torus_dist(engine().s_hat({spec().x1_star, CirclePoint::from_double(y1 - 0.30)}), top) >= 0.01);
  }

  TEST_CASE("the extension is continuous where the literal formula jumps") {
    const CirclePoint x = spec().x1_star - engine().base().alpha();
    const FiberCdf f = engine().fiber(x);
    REQUIRE(f.atoms().size() == 1);
    const Lift a = f.atoms()[0].position;
    const TorusPoint c{x, CirclePoint::from_double(0.5 * (f.left_limit(a) + f(a).value))};
    const auto ext = oscillation_profile(engine(), c, 1e-3, false);
    const auto direct = oscillation_profile(engine(), c, 1e-3, true);
    CHECK(ext.back() <= 0.5 * ext.front());
    CHECK(direct.back() >= 0.1);
    // away from atom fibers the two formulas agree
    Gen g(48);
    for (int i = 0; i < 200; ++i) {
      const TorusPoint z = g.torus();
      CHECK(engine().s_hat(z) == engine().s_hat_direct(z));
    }
  }

  TEST_CASE("orbits") {
    const TorusPoint z0{CirclePoint::from_double(0.3), CirclePoint::from_double(0.4)};
    const auto orb = engine().orbit(MapId::blown_up, z0, 100);
    REQUIRE(orb.size() == 101);
    for (std::size_t n = 0; n < orb.size(); ++n) CHECK(orb[n].x == engine().base().rotate(z0.x, static_cast<std::int64_t>(n)));
    const auto s = engine().orbit(MapId::parry, z0, 10);
    CHECK(s.back() == [&] {
      TorusPoint z = z0;
      for (int i = 0; i < 10; ++i) z = engine().base().step(z);
      return z;
    }());
    CHECK_THROWS_AS(engine().apply(MapId::klein, z0), std::invalid_argument);
    CHECK(engine().orbit(MapId::blown_up, z0, 0).size() == 1);
  }

  TEST_CASE("orbit membership of the star fibers") {
    const CirclePoint alpha = engine().base().alpha();
    CHECK(engine().in_backward_orbit(spec().x1_star - alpha.times(7), 10));
    CHECK_FALSE(engine().in_backward_orbit(spec().x1_star + alpha.times(7), 10));
    CHECK(engine().in_orbit(spec().x2_star() + alpha.times(7), 10));
    CHECK_FALSE(engine().in_orbit(CirclePoint::from_double(0.3), 1000));
  }
}
