#pragma once

// Seeded generators for the property tests, biased towards the values where
// fixed-point code tends to break (0, 1/2, the top of the circle, tiny offsets).

#include <cstdint>
#include <random>

#include "minimal_bottle/klein.hpp"
#include "minimal_bottle/transport.hpp"

namespace testing_support {

using namespace minimal_bottle;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t bits() { return rng_(); }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  CirclePoint point() { return CirclePoint::from_raw(rng_()); }
  CirclePoint edgy_point() {
    switch (rng_() % 8) {
      case 0:
        return CirclePoint{};
      case 1:
        return CirclePoint::half();
      case 2:
        return CirclePoint::from_raw(~std::uint64_t{0} - (rng_() & 0xff));
      case 3:
        return CirclePoint::from_raw(rng_() & 0xff);
      case 4:
        return CirclePoint::half() + CirclePoint::from_raw(rng_() & 0xff);
      default:
        return point();
    }
  }
  Lift lift() { return Lift::from_raw(rng_()); }
  Lift edgy_lift() {
    switch (rng_() % 6) {
      case 0:
        return Lift::zero();
      case 1:
        return Lift::one();
      case 2:
        return Lift::from_raw(kFullTurn - (rng_() & 0xff));
      default:
        return lift();
    }
  }
  TorusPoint torus() { return {point(), point()}; }
  TorusPoint edgy_torus() { return {edgy_point(), edgy_point()}; }

 private:
  std::mt19937_64 rng_;
};

inline const TransportEngine& default_engine() {
  static const TransportEngine engine(CocycleSpec::liouville_default(), ProfileSpec{});
  return engine;
}

inline double gap(const TransportEngine& e) { return std::ldexp(1.0, -e.truncation() - 1); }

}  // namespace testing_support
