#pragma once

// Fixed-point arithmetic on the circle T^1 = R/Z.
//
// A point is stored as a 64-bit fraction of a full turn, so reduction mod 1 is
// the natural wrap of unsigned arithmetic and n*alpha is exact for every n.

#include <compare>
#include <cstdint>

namespace minimal_bottle {

using uint128 = unsigned __int128;

inline constexpr double kTwoPow64 = 0x1p64;
inline constexpr double kTwoPowMinus64 = 0x1p-64;
inline constexpr uint128 kFullTurn = uint128{1} << 64;

class CirclePoint {
 public:
  constexpr CirclePoint() = default;

  static constexpr CirclePoint from_raw(std::uint64_t raw) { return CirclePoint(raw); }
  /// Reduces `turns` mod 1 and rounds to the nearest 2^-64.
  static CirclePoint from_double(double turns);
  /// Nearest 2^-64 to p/q mod 1; q must be nonzero.
  static CirclePoint from_ratio(std::int64_t p, std::uint64_t q);
  static constexpr CirclePoint half() { return CirclePoint(std::uint64_t{1} << 63); }

  constexpr std::uint64_t raw() const { return raw_; }
  /// Value in [0,1); the low 11 bits are truncated so the result never rounds up to 1.
  double to_double() const;

  /// True for x in [0, 1/2).
  constexpr bool in_first_half() const { return raw_ < (std::uint64_t{1} << 63); }

  /// n * this mod 1, exact.
  constexpr CirclePoint times(std::int64_t n) const {
    return CirclePoint(raw_ * static_cast<std::uint64_t>(n));
  }

  constexpr CirclePoint operator+(CirclePoint o) const { return CirclePoint(raw_ + o.raw_); }
  constexpr CirclePoint operator-(CirclePoint o) const { return CirclePoint(raw_ - o.raw_); }
  constexpr CirclePoint operator-() const { return CirclePoint(0 - raw_); }
  CirclePoint& operator+=(CirclePoint o) {
    raw_ += o.raw_;
    return *this;
  }
  CirclePoint& operator-=(CirclePoint o) {
    raw_ -= o.raw_;
    return *this;
  }

  constexpr auto operator<=>(const CirclePoint&) const = default;

 private:
  constexpr explicit CirclePoint(std::uint64_t raw) : raw_(raw) {}
  std::uint64_t raw_ = 0;
};

/// A position on a fiber lifted to [0,1]; unlike CirclePoint it can hold 1.
class Lift {
 public:
  constexpr Lift() = default;
  static constexpr Lift zero() { return Lift(0); }
  static constexpr Lift one() { return Lift(kFullTurn); }
  /// raw in [0, 2^64]; larger values are clamped.
  static constexpr Lift from_raw(uint128 raw) { return Lift(raw > kFullTurn ? kFullTurn : raw); }
  static constexpr Lift from_point(CirclePoint p) { return Lift(p.raw()); }
  /// Clamps to [0,1] and rounds to the nearest 2^-64.
  static Lift from_double(double y);

  constexpr uint128 raw() const { return raw_; }
  constexpr bool is_one() const { return raw_ == kFullTurn; }
  constexpr CirclePoint point() const { return CirclePoint::from_raw(static_cast<std::uint64_t>(raw_)); }
  double to_double() const;

  constexpr auto operator<=>(const Lift&) const = default;

 private:
  constexpr explicit Lift(uint128 raw) : raw_(raw) {}
  uint128 raw_ = 0;
};

/// Closed, positively oriented arc of T^1.
class Arc {
 public:
  enum class Kind { ordinary, full_circle, singleton };

  constexpr Arc() = default;

  Kind kind() const { return kind_; }
  CirclePoint start() const { return start_; }
  CirclePoint end() const { return end_; }
  /// Swept length in units of 2^-64 turns, in [0, 2^64].
  uint128 raw_length() const;

  friend Arc arc_from(CirclePoint a, CirclePoint b, bool full);

 private:
  CirclePoint start_;
  CirclePoint end_;
  Kind kind_ = Kind::singleton;
};

/// Arc swept from a to b in the positive direction. When a == b the result is
/// the full circle if `full` is set and the singleton {a} otherwise.
Arc arc_from(CirclePoint a, CirclePoint b, bool full = false);

/// The arc [0, y] for a lift y; y = 1 gives the full circle, y = 0 the singleton {0}.
Arc arc_to(Lift y);

bool arc_contains(const Arc& arc, CirclePoint p);
double arc_length(const Arc& arc);

/// Lebesgue measure of a ∩ b, exact in units of 2^-64.
uint128 raw_overlap(const Arc& a, const Arc& b);
double overlap_length(const Arc& a, const Arc& b);

/// Shift-invariant metric min(|a-b|, 1-|a-b|), in [0, 1/2].
double circle_dist(CirclePoint a, CirclePoint b);

inline double to_double(uint128 v) { return static_cast<double>(v); }

}  // namespace minimal_bottle
