#pragma once

// The base dynamics: rotation by alpha, the involution P, the odd cocycle r,
// its Birkhoff sums, and the skew product S(x, y) = (x + alpha, y + r(x)).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "minimal_bottle/circle.hpp"

namespace minimal_bottle {

struct Harmonic {
  std::uint64_t frequency = 1;  // must be odd
  double amplitude = 0.0;
};

struct CocycleSpec {
  /// Continued-fraction partial quotients a_1, a_2, ... of alpha = [0; a_1, a_2, ...].
  std::vector<std::uint64_t> partial_quotients;
  std::vector<Harmonic> harmonics;
  double scale = 0.2;

  /// Superexponential odd-denominator recipe [1, 20, 4000, 2000000] with one
  /// harmonic per convergent denominator except the last.
  static CocycleSpec liouville_default();

  /// Structural invariant violations (odd frequencies, positivity, amplitude bound).
  std::vector<std::string> violations() const;
};

struct Convergent {
  std::uint64_t p = 0;
  std::uint64_t q = 1;
};

/// Convergents p_k/q_k, k = 1..K. Throws std::invalid_argument when a
/// denominator leaves the representable range or a quotient is zero.
std::vector<Convergent> convergents(std::span<const std::uint64_t> partial_quotients);

struct TorusPoint {
  CirclePoint x;
  CirclePoint y;
  constexpr auto operator<=>(const TorusPoint&) const = default;
};

/// P(x, y) = (x + 1/2, 1 - y).
constexpr TorusPoint involution(TorusPoint z) { return {z.x + CirclePoint::half(), -z.y}; }

/// Product (max) metric on T^2.
double torus_dist(TorusPoint a, TorusPoint b);

/// sin(2 pi u) for u a fraction of a turn; exactly odd under u -> u + 1/2.
double sin_turn(CirclePoint u);

class SkewProduct {
 public:
  /// Computes alpha and its convergents; throws on unrepresentable recipes.
  explicit SkewProduct(CocycleSpec spec);

  const CocycleSpec& spec() const { return spec_; }
  CirclePoint alpha() const { return alpha_; }
  std::span<const Convergent> convergents() const { return convergents_; }

  /// x + n*alpha, computed from n directly.
  CirclePoint rotate(CirclePoint x, std::int64_t n = 1) const { return x + alpha_.times(n); }

  double r(CirclePoint x) const;
  /// r(x) in units of 2^-64 turns, reduced into (-1/2, 1/2).
  std::int64_t r_raw(CirclePoint x) const;
  CirclePoint r_shift(CirclePoint x) const {
    return CirclePoint::from_raw(static_cast<std::uint64_t>(r_raw(x)));
  }

  /// Birkhoff sum rho_n(x) = r(x) + ... + r(x + (n-1) alpha); for n < 0 the
  /// cocycle extension -(r(x - alpha) + ... + r(x + n alpha)).
  double rho(CirclePoint x, std::int64_t n) const;
  CirclePoint rho_shift(CirclePoint x, std::int64_t n) const;

  /// sigma_x^n(y) = y + rho_n(x) mod 1.
  CirclePoint sigma(CirclePoint x, std::int64_t n, CirclePoint y) const { return y + rho_shift(x, n); }

  TorusPoint step(TorusPoint z) const { return {rotate(z.x), z.y + r_shift(z.x)}; }
  TorusPoint step_inverse(TorusPoint z) const {
    const CirclePoint back = rotate(z.x, -1);
    return {back, z.y - r_shift(back)};
  }

  /// Invalid parameters plus a grid check of 0 < r < 1/4 on (0, 1/2).
  std::vector<std::string> violations(std::size_t grid = 10000) const;

 private:
  __int128 raw_sum(CirclePoint x, std::int64_t n) const;

  CocycleSpec spec_;
  std::vector<Convergent> convergents_;
  CirclePoint alpha_;
};

/// Partial Birkhoff sums along one forward orbit, extended on demand.
class BirkhoffCache {
 public:
  BirkhoffCache(const SkewProduct& base, CirclePoint x) : base_(&base), x_(x) { sums_.push_back(0); }

  /// rho_n(x) as a circle shift.
  CirclePoint shift(std::size_t n);
  double value(std::size_t n);

 private:
  void extend(std::size_t n);

  const SkewProduct* base_;
  CirclePoint x_;
  std::vector<__int128> sums_;
};

struct CoboundaryReport {
  std::vector<double> terms;         // c_k / |exp(2 pi i q_k alpha) - 1|
  std::vector<double> partial_sums;  // G_1, ..., G_K
  std::vector<double> ratios;        // G_k / G_{k-1}, k = 2..K
  double factor = 10.0;
  bool growing = false;              // K >= 2 and every ratio >= factor
};

/// Small-divisor growth of the cocycle's Fourier data; K must not exceed the
/// number of harmonics.
CoboundaryReport coboundary_diagnostic(const SkewProduct& base, std::size_t K, double factor = 10.0);

}  // namespace minimal_bottle
