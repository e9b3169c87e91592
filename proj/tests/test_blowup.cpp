#include <doctest.h>

#include <cmath>

#include "minimal_bottle/oracle.hpp"
#include "support.hpp"

using namespace minimal_bottle;
using testing_support::default_engine;
using testing_support::Gen;

namespace {
const FiberMeasures& measures() { return default_engine().measures(); }
const Profiles& profiles() { return default_engine().profiles(); }
const ProfileSpec& spec() { return profiles().spec(); }

CirclePoint in_bump(Gen& g) {
  const auto width = static_cast<double>((spec().bump_hi - spec().bump_lo).raw());
  return spec().bump_lo + CirclePoint::from_raw(static_cast<std::uint64_t>(g.unit() * width));
}
}  // namespace

TEST_SUITE("blowup") {
  TEST_CASE("quantize_lift lands on the 2^-53 grid") {
    CHECK(quantize_lift(0.5) == 0.5);
    CHECK(quantize_lift(0.1) == std::ldexp(std::nearbyint(std::ldexp(0.1, 53)), -53));
    Gen g(31);
    for (int i = 0; i < 1000; ++i) {
      const double v = quantize_lift(g.unit());
      CHECK(1.0 - (1.0 - v) == v);
    }
  }

  TEST_CASE("profiles meet only at the star points") {
    CHECK(profiles().phi(spec().x1_star) == spec().y1_star);
    CHECK(profiles().psi(spec().x1_star) == spec().y1_star);
    CHECK(profiles().phi(spec().x2_star()) == 1.0 - spec().y1_star);
    Gen g(32);
    for (int i = 0; i < 2000; ++i) {
      const CirclePoint x = in_bump(g);
      if (x == spec().x1_star) continue;
      CHECK(profiles().phi(x) != profiles().psi(x));
      const double lo = x < spec().x1_star ? profiles().psi(x) : profiles().phi(x);
      CHECK(lo <= spec().y1_star);
    }
  }

  TEST_CASE("profile graphs are P-invariant exactly") {
    Gen g(33);
    for (int i = 0; i < 5000; ++i) {
      const CirclePoint x = (i % 2) ? in_bump(g) : g.edgy_point();
      const CirclePoint px = x + CirclePoint::half();
      CHECK(profiles().phi(px) == 1.0 - profiles().phi(x));
      CHECK(profiles().psi(px) == 1.0 - profiles().psi(x));
    }
  }

  TEST_CASE("asymmetry breaks P-invariance") {
    ProfileSpec s;
    s.asymmetry = 0.01;
    const Profiles p(s);
    const CirclePoint x = CirclePoint::from_double(0.12);
    CHECK(p.phi(x + CirclePoint::half()) != 1.0 - p.phi(x));
  }

  TEST_CASE("support kinds") {
    CHECK(profiles().support(spec().x1_star).kind == FiberSupport::Kind::dirac);
    CHECK(profiles().support(spec().x2_star()).kind == FiberSupport::Kind::dirac);
    CHECK(profiles().support(CirclePoint::from_double(0.3)).kind == FiberSupport::Kind::lebesgue);
    CHECK(profiles().support(spec().bump_lo).kind == FiberSupport::Kind::lebesgue);
    const CirclePoint x = CirclePoint::from_double(0.15);
    const FiberSupport s = profiles().support(x);
    REQUIRE(s.kind == FiberSupport::Kind::uniform);
    CHECK(to_double(s.length) * kTwoPowMinus64 == doctest::Approx(std::abs(profiles().phi(x) - profiles().psi(x))));
  }

  TEST_CASE("mu0 is a probability measure with the reflection symmetry") {
    Gen g(34);
    for (int i = 0; i < 3000; ++i) {
      const CirclePoint x = (i % 2) ? in_bump(g) : g.edgy_point();
      CHECK(measures().mu0(x, arc_to(Lift::one())) == doctest::Approx(1.0).epsilon(1e-15));
      const CirclePoint a = g.point(), b = g.point();
      const double m = measures().mu0(x, arc_from(a, b));
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
      CHECK(m + measures().mu0(x + CirclePoint::half(), arc_from(-a, -b)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("mun is mu0 pushed along the cocycle") {
    Gen g(35);
    for (int i = 0; i < 500; ++i) {
      const CirclePoint x = g.point(), a = g.point(), b = g.point();
      const auto n = g.integer(1, 40);
      const CirclePoint rho = default_engine().base().rho_shift(x, 1);
      const double direct = measures().mun(x, n, arc_from(a, b));
      const double moved = measures().mun(default_engine().base().rotate(x), n - 1, arc_from(a + rho, b + rho));
      CHECK(direct == moved);
    }
  }

  TEST_CASE("symmetry of the fiber CDF under P") {
    Gen g(36);
    for (int i = 0; i < 2000; ++i) {
      const CirclePoint x = (i % 3 == 0) ? in_bump(g) : g.edgy_point();
      const Lift y = g.edgy_lift();
      const double s = measures().cdf(x, y).value + measures().cdf(x + CirclePoint::half(), Lift::from_raw(kFullTurn - y.raw())).value;
      CHECK(std::abs(s - 1.0) <= 2 * testing_support::gap(default_engine()) + 1e-12);
    }
  }

  TEST_CASE("CDF endpoints, monotonicity and slope") {
    Gen g(37);
    for (int i = 0; i < 200; ++i) {
      const FiberCdf f = measures().fiber(g.edgy_point());
      CHECK(f(Lift::one()).value == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(f(Lift::zero()).value <= 0.25 + 1e-15);
      double prev = -1.0;
      for (int k = 0; k <= 256; ++k) {
        const Lift y = Lift::from_raw((uint128(k) << 64) / 256);
        const double v = f(y).value;
        CHECK(v >= prev + (k ? 0.5 / 256 - 1e-15 : 0.0));
        prev = v;
      }
    }
  }

  TEST_CASE("atoms") {
    CHECK(measures().atom_mass(spec().x1_star, spec().y1_star_point()) == 0.25);
    CHECK(measures().atom_mass(spec().x2_star(), spec().y2_star_point()) == 0.25);
    const CirclePoint back = spec().x1_star - default_engine().base().alpha();
    const FiberCdf f = measures().fiber(back);
    REQUIRE(f.atoms().size() == 1);
    CHECK(f.atoms()[0].mass == 0.125);
    CHECK(f(f.atoms()[0].position).value - f.left_limit(f.atoms()[0].position) == doctest::Approx(0.125));
    CHECK(measures().fiber(CirclePoint::from_double(0.3)).atoms().empty());
    // forward images of the star fiber carry no atoms
    CHECK(measures().fiber(spec().x1_star + default_engine().base().alpha()).atoms().empty());
  }

  TEST_CASE("truncation brackets the deep CDF") {
    Gen g(38);
    for (int i = 0; i < 300; ++i) {
      const CirclePoint x = g.point();
      const Lift y = g.lift();
      const int n = static_cast<int>(g.integer(1, 12));
      const CdfValue coarse = measures().cdf(x, y, n);
      const double fine = measures().cdf(x, y).value;
      CHECK(coarse.truncation_gap == std::ldexp(1.0, -n - 1));
      CHECK(coarse.value <= fine);
      CHECK(fine <= coarse.value + coarse.truncation_gap);
    }
  }

  TEST_CASE("single-component fiber far from the bumps") {
    // x = 0.3 lies outside both bumps, so with N = 1 the CDF is 3y/4
    const CirclePoint x = CirclePoint::from_ratio(3, 10);
    const CdfOracle oracle(default_engine().base().spec(), spec(), 1, 1000);
    for (int k = 0; k <= 20; ++k) {
      const double y = k / 20.0;
      const CdfValue v = measures().cdf(x, Lift::from_double(y), 1);
      CHECK(v.value == doctest::Approx(0.75 * y).epsilon(1e-15));
      CHECK(std::abs(v.value - oracle(0.3, y)) <= v.truncation_gap);
    }
    CHECK(oracle(0.3, 1.0) == doctest::Approx(0.75));
  }

  TEST_CASE("oracle agrees with the fixed-point CDF") {
    const CdfOracle oracle(default_engine().base().spec(), spec(), 60, 4000);
    Gen g(39);
    for (int i = 0; i < 40; ++i) {
      const double x = g.unit(), y = g.unit();
      CHECK(std::abs(oracle(x, y) - measures().cdf(CirclePoint::from_double(x), Lift::from_double(y)).value) < 1e-3);
    }
  }

  TEST_CASE("star-point scan") {
    const auto rep = validate_star_points(default_engine().base(), spec(), 10000, 1e-9);
    CHECK(rep.ok);
    CHECK(rep.min_margin > 1e-6);
    ProfileSpec bad;
    bad.y1_star = 0.0;  // z1* sits on y = 0 at m = 0
    CHECK_FALSE(validate_star_points(default_engine().base(), bad, 10, 1e-9).ok);
  }

  TEST_CASE("profile spec violations") {
    CHECK(ProfileSpec{}.violations().empty());
    ProfileSpec s;
    s.x1_star = CirclePoint::from_double(0.3);
    CHECK_FALSE(s.violations().empty());
    ProfileSpec t;
    t.bump_lo = CirclePoint::from_double(0.13);
    CHECK_FALSE(t.violations().empty());
  }
}
