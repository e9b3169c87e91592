#include "minimal_bottle/oracle.hpp"

#include <cmath>
#include <numbers>

namespace minimal_bottle {

namespace {

long double frac(long double v) { return v - std::floor(v); }

}  // namespace

CdfOracle::CdfOracle(const CocycleSpec& cocycle, const ProfileSpec& profile, int truncation, std::size_t cells)
    : scale_(cocycle.scale), truncation_(truncation), cells_(cells) {
  for (const auto& h : cocycle.harmonics) {
    freq_.push_back(static_cast<long double>(h.frequency));
    amp_.push_back(h.amplitude);
  }
  long double p_prev = 1, q_prev = 0, p = 0, q = 1;
  for (auto a : cocycle.partial_quotients) {
    const long double pn = static_cast<long double>(a) * p + p_prev;
    const long double qn = static_cast<long double>(a) * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
  }
  alpha_ = frac(p / q);
  x1_ = profile.x1_star.to_double();
  y1_ = profile.y1_star;
  lo_ = profile.bump_lo.to_double();
  hi_ = profile.bump_hi.to_double();
  y1_second_ = profile.y1_star - profile.asymmetry;
}

long double CdfOracle::r(long double x) const {
  long double acc = 0;
  for (std::size_t k = 0; k < freq_.size(); ++k) {
    acc += amp_[k] * std::sin(2 * std::numbers::pi_v<long double> * frac(freq_[k] * x));
  }
  return scale_ * acc;
}

CdfOracle::Bounds CdfOracle::support(long double x) const {
  x = frac(x);
  const bool second = x >= 0.5L;
  const long double b = second ? x - 0.5L : x;
  const long double star = second ? y1_second_ : y1_;
  if (std::fabs(b - x1_) < 1e-15L) return {true, second ? 1 - star : star, 0};
  if (b <= lo_ || b >= hi_) return {false, 0, 1};
  long double phi, psi;
  if (b < x1_) {
    const long double t = (b - lo_) / (x1_ - lo_);
    phi = 1 + t * (star - 1);
    psi = t * star;
  } else {
    const long double t = (b - x1_) / (hi_ - x1_);
    phi = star * (1 - t);
    psi = star + t * (1 - star);
  }
  if (second) {
    phi = 1 - phi;
    psi = 1 - psi;
  }
  return {false, std::fmin(phi, psi), std::fmax(phi, psi)};
}

double CdfOracle::operator()(double x, double y) const {
  long double total = 0.5L * y;
  long double rho = 0;
  long double weight = 0.25L;
  for (int n = 0; n < truncation_; ++n) {
    const long double xn = frac(x + n * alpha_);
    const Bounds s = support(xn);
    long double mass;
    if (s.dirac) {
      mass = frac(s.lo - rho) <= y ? 1 : 0;
    } else if (s.lo == 0 && s.hi == 1) {
      mass = y;
    } else {
      const long double width = s.hi - s.lo;
      std::size_t hits = 0;
      for (std::size_t i = 0; i < cells_; ++i) {
        const long double mid = s.lo + (i + 0.5L) * width / cells_;
        if (frac(mid - rho) <= y) ++hits;
      }
      mass = static_cast<long double>(hits) / cells_;
    }
    total += weight * mass;
    rho += r(xn);
    weight *= 0.5L;
  }
  return static_cast<double>(total);
}

}  // namespace minimal_bottle
