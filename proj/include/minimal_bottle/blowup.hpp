#pragma once

// Blow-up data: the star points, the P-invariant profiles phi and psi, the
// fiber measures mu_x^0, mu_x^n, mu_x, and the truncated fiber CDF.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "minimal_bottle/circle.hpp"
#include "minimal_bottle/skew.hpp"

namespace minimal_bottle {

/// Rounds a lift to the 2^-53 grid, where 1 - v is exact.
double quantize_lift(double v);

struct ProfileSpec {
  CirclePoint x1_star = CirclePoint::from_ratio(1, 8);
  double y1_star = 0.5;  // lift in [0,1), kept on the 2^-53 grid
  CirclePoint bump_lo = CirclePoint::from_ratio(21, 200);
  CirclePoint bump_hi = CirclePoint::from_ratio(39, 200);
  /// Negative control only: lowers the star height used on the second bump,
  /// which destroys the P-invariance of the profile graphs. Zero in every real config.
  double asymmetry = 0.0;

  CirclePoint x2_star() const { return x1_star + CirclePoint::half(); }
  /// Star height on the second bump; 1 - y1_star when asymmetry is zero.
  double y2_star_lift() const;
  CirclePoint y1_star_point() const { return CirclePoint::from_double(y1_star); }
  CirclePoint y2_star_point() const { return CirclePoint::from_double(y2_star_lift()); }

  std::vector<std::string> violations() const;
};

/// Support of mu_x^0: a Dirac mass, Lebesgue measure, or normalized Lebesgue on an arc.
struct FiberSupport {
  enum class Kind { lebesgue, uniform, dirac };
  Kind kind = Kind::lebesgue;
  CirclePoint start;   // uniform: arc start; dirac: the atom
  uint128 length = 0;  // uniform: arc length in units of 2^-64
};

class Profiles {
 public:
  explicit Profiles(ProfileSpec spec);

  const ProfileSpec& spec() const { return spec_; }

  /// Lift of phi: falls 1 -> y1* -> 0 across the first bump.
  double phi(CirclePoint x) const;
  /// Lift of psi: rises 0 -> y1* -> 1 across the first bump.
  double psi(CirclePoint x) const;

  FiberSupport support(CirclePoint x) const;

 private:
  struct Pair {
    double phi;
    double psi;
  };
  Pair first_half(CirclePoint base, double star) const;
  Pair evaluate(CirclePoint x) const;

  ProfileSpec spec_;
};

struct CdfValue {
  double value = 0.0;
  /// The untruncated CDF lies in [value, value + truncation_gap].
  double truncation_gap = 0.0;
};

struct Atom {
  Lift position;
  double mass = 0.0;
};

class FiberMeasures;

/// y -> mu_x[0, y] on one fiber, with base points and Birkhoff sums precomputed.
class FiberCdf {
 public:
  FiberCdf(const FiberMeasures& measures, CirclePoint x, int truncation);

  CirclePoint base_point() const { return x_; }
  int truncation() const { return static_cast<int>(components_.size()); }

  /// mu_x[0, y] over the positively oriented closed arc from 0 to the lift y.
  CdfValue operator()(Lift y) const;
  /// mu_x[0, y), i.e. without an atom sitting exactly at y.
  double left_limit(Lift y) const;
  /// Mass of the n-th pushed-forward component on [0, y].
  double component(std::size_t n, Lift y) const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  /// Total atom mass sitting exactly at y.
  double atom_mass_at(Lift y) const;

 private:
  struct Component {
    FiberSupport::Kind kind;
    uint128 offset;  // support start (or atom) pulled back by rho_n
    uint128 length;
    double weight;   // 2^{-n-2}
  };
  double mass(const Component& c, uint128 y, bool closed) const;
  double evaluate(Lift y, bool closed) const;

  CirclePoint x_;
  std::vector<Component> components_;
  std::vector<Atom> atoms_;
  double gap_ = 0.0;
};

class FiberMeasures {
 public:
  FiberMeasures(const SkewProduct& base, const Profiles& profiles, int truncation = 60);

  const SkewProduct& base() const { return *base_; }
  const Profiles& profiles() const { return *profiles_; }
  int truncation() const { return truncation_; }

  double mu0(CirclePoint x, const Arc& a) const;
  /// mu_x^n(A) = mu^0_{x + n alpha}(A + rho_n(x)).
  double mun(CirclePoint x, std::int64_t n, const Arc& a) const;

  CdfValue cdf(CirclePoint x, Lift y) const { return fiber(x)(y); }
  CdfValue cdf(CirclePoint x, Lift y, int truncation) const { return fiber(x, truncation)(y); }
  double atom_mass(CirclePoint x, CirclePoint y) const { return fiber(x).atom_mass_at(Lift::from_point(y)); }

  FiberCdf fiber(CirclePoint x) const { return FiberCdf(*this, x, truncation_); }
  FiberCdf fiber(CirclePoint x, int truncation) const { return FiberCdf(*this, x, truncation); }

 private:
  const SkewProduct* base_;
  const Profiles* profiles_;
  int truncation_;
};

struct StarPointReport {
  double min_margin = 1.0;
  std::int64_t worst_m = 0;
  int worst_star = 1;
  bool ok = false;
};

/// Distances from y_j* to the excluded heights sigma^{-m}(0) and
/// sigma^{-m}(-r(R^m x_j*)) for |m| <= horizon; ok iff all exceed `margin`.
StarPointReport validate_star_points(const SkewProduct& base, const ProfileSpec& spec, std::int64_t horizon,
                                     double margin);

}  // namespace minimal_bottle
