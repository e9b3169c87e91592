#include "minimal_bottle/circle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace minimal_bottle {

namespace {

struct Interval {
  uint128 lo;
  uint128 hi;
};

// Splits an arc into at most two intervals of [0, 2^64].
int decompose(const Arc& arc, std::array<Interval, 2>& out) {
  const uint128 s = arc.start().raw();
  const uint128 e = arc.end().raw();
  switch (arc.kind()) {
    case Arc::Kind::full_circle:
      out[0] = {0, kFullTurn};
      return 1;
    case Arc::Kind::singleton:
      out[0] = {s, s};
      return 1;
    case Arc::Kind::ordinary:
      break;
  }
  if (s <= e) {
    out[0] = {s, e};
    return 1;
  }
  out[0] = {s, kFullTurn};
  out[1] = {0, e};
  return 2;
}

}  // namespace

CirclePoint CirclePoint::from_double(double turns) {
  if (!std::isfinite(turns)) throw std::invalid_argument("CirclePoint::from_double: non-finite value");
  double frac = turns - std::floor(turns);
  double scaled = std::nearbyint(frac * kTwoPow64);
  if (scaled >= kTwoPow64) return CirclePoint(0);
  return CirclePoint(static_cast<std::uint64_t>(scaled));
}

CirclePoint CirclePoint::from_ratio(std::int64_t p, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("CirclePoint::from_ratio: zero denominator");
  std::int64_t m = p % static_cast<std::int64_t>(q);
  if (m < 0) m += static_cast<std::int64_t>(q);
  const uint128 num = (static_cast<uint128>(m) << 64) + q / 2;
  return CirclePoint(static_cast<std::uint64_t>(num / q));
}

double CirclePoint::to_double() const { return std::ldexp(static_cast<double>(raw_ >> 11), -53); }

Lift Lift::from_double(double y) {
  if (std::isnan(y)) throw std::invalid_argument("Lift::from_double: NaN");
  if (y <= 0.0) return zero();
  if (y >= 1.0) return one();
  return Lift(static_cast<uint128>(std::nearbyint(y * kTwoPow64)));
}

double Lift::to_double() const {
  if (is_one()) return 1.0;
  return CirclePoint::from_raw(static_cast<std::uint64_t>(raw_)).to_double();
}

uint128 Arc::raw_length() const {
  switch (kind_) {
    case Kind::full_circle:
      return kFullTurn;
    case Kind::singleton:
      return 0;
    case Kind::ordinary:
      break;
  }
  return static_cast<uint128>((end_ - start_).raw());
}

Arc arc_from(CirclePoint a, CirclePoint b, bool full) {
  Arc arc;
  arc.start_ = a;
  arc.end_ = b;
  if (a == b) {
    arc.kind_ = full ? Arc::Kind::full_circle : Arc::Kind::singleton;
  } else {
    arc.kind_ = Arc::Kind::ordinary;
  }
  return arc;
}

Arc arc_to(Lift y) { return arc_from(CirclePoint{}, y.point(), y.is_one()); }

bool arc_contains(const Arc& arc, CirclePoint p) {
  switch (arc.kind()) {
    case Arc::Kind::full_circle:
      return true;
    case Arc::Kind::singleton:
      return p == arc.start();
    case Arc::Kind::ordinary:
      break;
  }
  return (p - arc.start()).raw() <= (arc.end() - arc.start()).raw();
}

double arc_length(const Arc& arc) { return to_double(arc.raw_length()) * kTwoPowMinus64; }

uint128 raw_overlap(const Arc& a, const Arc& b) {
  std::array<Interval, 2> ia{};
  std::array<Interval, 2> ib{};
  const int na = decompose(a, ia);
  const int nb = decompose(b, ib);
  uint128 total = 0;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const uint128 lo = std::max(ia[i].lo, ib[j].lo);
      const uint128 hi = std::min(ia[i].hi, ib[j].hi);
      if (hi > lo) total += hi - lo;
    }
  }
  return total;
}

double overlap_length(const Arc& a, const Arc& b) {
  return to_double(raw_overlap(a, b)) * kTwoPowMinus64;
}

double circle_dist(CirclePoint a, CirclePoint b) {
  const std::uint64_t d = (a - b).raw();
  const std::uint64_t m = std::min(d, std::uint64_t{0} - d);
  return static_cast<double>(m) * kTwoPowMinus64;
}

}  // namespace minimal_bottle
