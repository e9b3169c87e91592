#include "minimal_bottle/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minimal_bottle {

double quantize_lift(double v) { return std::ldexp(std::nearbyint(std::ldexp(v, 53)), -53); }

double ProfileSpec::y2_star_lift() const {
  return 1.0 - quantize_lift(y1_star - asymmetry);
}

std::vector<std::string> ProfileSpec::violations() const {
  std::vector<std::string> out;
  const CirclePoint tenth = CirclePoint::from_double(0.1);
  const CirclePoint fifth = CirclePoint::from_double(0.2);
  if (!(tenth < x1_star && x1_star < fifth)) out.emplace_back("blowup.x1_star must lie in (0.1, 0.2)");
  if (!(tenth < bump_lo && bump_lo < x1_star && x1_star < bump_hi && bump_hi < fifth)) {
    out.emplace_back("blowup.bump must satisfy 0.1 < lo < x1_star < hi < 0.2");
  }
  if (!(y1_star >= 0.0 && y1_star < 1.0)) out.emplace_back("blowup.y1_star must lie in [0, 1)");
  if (quantize_lift(y1_star) != y1_star) out.emplace_back("blowup.y1_star must be a multiple of 2^-53");
  return out;
}

Profiles::Profiles(ProfileSpec spec) : spec_(std::move(spec)) {
  spec_.y1_star = quantize_lift(spec_.y1_star);
}

// Lifts on the first half; `base` is in [0, 1/2).
Profiles::Pair Profiles::first_half(CirclePoint base, double star) const {
  const auto& s = spec_;
  if (!(s.bump_lo < base && base < s.bump_hi)) return {0.0, 0.0};
  if (base == s.x1_star) return {star, star};
  if (base < s.x1_star) {
    const double t = static_cast<double>((base - s.bump_lo).raw()) / static_cast<double>((s.x1_star - s.bump_lo).raw());
    return {quantize_lift(1.0 + t * (star - 1.0)), quantize_lift(t * star)};
  }
  const double t = static_cast<double>((base - s.x1_star).raw()) / static_cast<double>((s.bump_hi - s.x1_star).raw());
  return {quantize_lift(star * (1.0 - t)), quantize_lift(star + t * (1.0 - star))};
}

Profiles::Pair Profiles::evaluate(CirclePoint x) const {
  if (x.in_first_half()) return first_half(x, spec_.y1_star);
  const Pair p = first_half(x - CirclePoint::half(), 1.0 - spec_.y2_star_lift());
  return {1.0 - p.phi, 1.0 - p.psi};
}

double Profiles::phi(CirclePoint x) const { return evaluate(x).phi; }
double Profiles::psi(CirclePoint x) const { return evaluate(x).psi; }

FiberSupport Profiles::support(CirclePoint x) const {
  if (x == spec_.x1_star) return {FiberSupport::Kind::dirac, spec_.y1_star_point(), 0};
  if (x == spec_.x2_star()) return {FiberSupport::Kind::dirac, spec_.y2_star_point(), 0};
  const Pair p = evaluate(x);
  const double lo = std::min(p.phi, p.psi);
  const double hi = std::max(p.phi, p.psi);
  // Outside the bumps both lifts sit at 0 (or 1), i.e. J(x) is the whole circle.
  if ((lo == 0.0 && hi == 1.0) || lo == hi) {
    if (lo == hi && !(lo == 0.0 || lo == 1.0)) {
      throw std::logic_error("profiles cross away from the star points");
    }
    return {FiberSupport::Kind::lebesgue, CirclePoint{}, kFullTurn};
  }
  const Lift a = Lift::from_double(lo);
  const Lift b = Lift::from_double(hi);
  return {FiberSupport::Kind::uniform, a.point(), b.raw() - a.raw()};
}

FiberCdf::FiberCdf(const FiberMeasures& measures, CirclePoint x, int truncation) : x_(x) {
  if (truncation < 1) throw std::invalid_argument("truncation depth must be at least 1");
  const SkewProduct& base = measures.base();
  const Profiles& profiles = measures.profiles();
  components_.reserve(static_cast<std::size_t>(truncation));
  BirkhoffCache sums(base, x);
  double weight = 0.25;
  for (int n = 0; n < truncation; ++n) {
    const FiberSupport s = profiles.support(base.rotate(x, n));
    const CirclePoint rho = sums.shift(static_cast<std::size_t>(n));
    Component c{s.kind, 0, s.length, weight};
    if (s.kind != FiberSupport::Kind::lebesgue) c.offset = (s.start - rho).raw();
    if (s.kind == FiberSupport::Kind::dirac) {
      const Lift pos = Lift::from_raw(c.offset);
      auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const Atom& a) { return a.position == pos; });
      if (it == atoms_.end()) {
        atoms_.push_back({pos, weight});
      } else {
        it->mass += weight;
      }
    }
    components_.push_back(c);
    weight *= 0.5;
  }
  gap_ = std::ldexp(1.0, -truncation - 1);
}

double FiberCdf::mass(const Component& c, uint128 y, bool closed) const {
  switch (c.kind) {
    case FiberSupport::Kind::lebesgue:
      return to_double(y) * kTwoPowMinus64;
    case FiberSupport::Kind::dirac:
      return (closed ? c.offset <= y : c.offset < y) ? 1.0 : 0.0;
    case FiberSupport::Kind::uniform:
      break;
  }
  const uint128 end = c.offset + c.length;
  uint128 overlap = 0;
  if (y > c.offset) overlap += std::min(y, end) - c.offset;
  if (end > kFullTurn) overlap += std::min(y, end - kFullTurn);
  return to_double(overlap) / to_double(c.length);
}

double FiberCdf::evaluate(Lift y, bool closed) const {
  double acc = 0.5 * y.to_double();
  for (const auto& c : components_) acc += c.weight * mass(c, y.raw(), closed);
  return acc;
}

CdfValue FiberCdf::operator()(Lift y) const { return {evaluate(y, true), gap_}; }

double FiberCdf::left_limit(Lift y) const { return evaluate(y, false); }

double FiberCdf::component(std::size_t n, Lift y) const { return mass(components_.at(n), y.raw(), true); }

double FiberCdf::atom_mass_at(Lift y) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.position == y) m += a.mass;
  }
  return m;
}

FiberMeasures::FiberMeasures(const SkewProduct& base, const Profiles& profiles, int truncation)
    : base_(&base), profiles_(&profiles), truncation_(truncation) {
  if (truncation < 1) throw std::invalid_argument("truncation depth must be at least 1");
}

double FiberMeasures::mu0(CirclePoint x, const Arc& a) const {
  const FiberSupport s = profiles_->support(x);
  switch (s.kind) {
    case FiberSupport::Kind::dirac:
      return arc_contains(a, s.start) ? 1.0 : 0.0;
    case FiberSupport::Kind::lebesgue:
      return arc_length(a);
    case FiberSupport::Kind::uniform:
      break;
  }
  const Arc support = arc_from(s.start, s.start + CirclePoint::from_raw(static_cast<std::uint64_t>(s.length)));
  return to_double(raw_overlap(a, support)) / to_double(s.length);
}

double FiberMeasures::mun(CirclePoint x, std::int64_t n, const Arc& a) const {
  const CirclePoint rho = base_->rho_shift(x, n);
  const Arc shifted = arc_from(a.start() + rho, a.end() + rho, a.kind() == Arc::Kind::full_circle);
  return mu0(base_->rotate(x, n), shifted);
}

StarPointReport validate_star_points(const SkewProduct& base, const ProfileSpec& spec, std::int64_t horizon,
                                     double margin) {
  if (horizon < 1) throw std::invalid_argument("validate_star_points: horizon must be >= 1");
  StarPointReport report;
  const CirclePoint xs[2] = {spec.x1_star, spec.x2_star()};
  const CirclePoint ys[2] = {spec.y1_star_point(), spec.y2_star_point()};
  for (int j = 0; j < 2; ++j) {
    auto consider = [&](std::int64_t m, CirclePoint height, CirclePoint base_point) {
      // S^m(z_j*) = (base_point, height) must avoid y = 0 and y = -r(x).
      const double d0 = circle_dist(height, CirclePoint{});
      const double d1 = circle_dist(height, -base.r_shift(base_point));
      const double d = std::min(d0, d1);
      if (d < report.min_margin) {
        report.min_margin = d;
        report.worst_m = m;
        report.worst_star = j + 1;
      }
    };
    CirclePoint forward = ys[j];
    CirclePoint backward = ys[j];
    consider(0, forward, xs[j]);
    for (std::int64_t m = 1; m <= horizon; ++m) {
      forward += base.r_shift(base.rotate(xs[j], m - 1));
      consider(m, forward, base.rotate(xs[j], m));
      backward -= base.r_shift(base.rotate(xs[j], -m));
      consider(-m, backward, base.rotate(xs[j], -m));
    }
  }
  report.ok = report.min_margin > margin;
  return report;
}

}  // namespace minimal_bottle
