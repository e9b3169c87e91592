#include "minimal_bottle/verify.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "minimal_bottle/oracle.hpp"

namespace minimal_bottle {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Each check draws from its own stream, so adding or reordering checks never
// changes the samples another check sees.
class Sampler {
 public:
  Sampler(std::uint64_t seed, std::string_view name) : gen_(seed ^ fnv1a(name)) {}

  CirclePoint point() { return CirclePoint::from_raw(gen_()); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }
  Lift lift() { return Lift::from_raw(gen_()); }
  TorusPoint torus() { return {point(), point()}; }

 private:
  std::mt19937_64 gen_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* bound_symbol(Bound b) {
  switch (b) {
    case Bound::at_most:
      return "<=";
    case Bound::below:
      return "<";
    case Bound::at_least:
      return ">=";
  }
  return "?";
}

Lift reflect(Lift y) { return Lift::from_raw(kFullTurn - y.raw()); }

template <class F>
std::vector<TorusPoint> torus_samples(Sampler& s, std::size_t n, F&& adjust) {
  std::vector<TorusPoint> pts(n);
  for (auto& p : pts) p = adjust(s.torus());
  return pts;
}

double max_of(const std::vector<double>& v) { return max_value(v); }

// Endpoint fibers and heights plus the collapse fibers, appended to random samples.
void add_special_points(const TransportEngine& engine, std::vector<TorusPoint>& pts) {
  const auto& spec = engine.profiles().spec();
  const CirclePoint alpha = engine.base().alpha();
  const std::size_t n = std::min<std::size_t>(pts.size(), 8);
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({pts[i].x, CirclePoint{}});
    pts.push_back({CirclePoint{}, pts[i].y});
    pts.push_back({CirclePoint::half(), pts[i].y});
  }
  for (CirclePoint x : {spec.x1_star, spec.x2_star(), spec.x1_star - alpha, spec.x2_star() - alpha}) {
    const FiberCdf f = engine.fiber(x);
    for (const Atom& a : f.atoms()) {
      const double lo = f.left_limit(a.position);
      const double hi = f(a.position).value;
      for (double t : {0.0, 0.5, 1.0}) pts.push_back({x, CirclePoint::from_double(lo + t * (hi - lo))});
    }
  }
}

bool outside_bumps(const Profiles& profiles, CirclePoint x) {
  return profiles.support(x).kind == FiberSupport::Kind::lebesgue;
}

}  // namespace

CheckResult make_check(std::string name, std::size_t samples, double residual, double tolerance, std::string detail,
                       Bound bound) {
  CheckResult c;
  c.name = std::move(name);
  c.samples = samples;
  c.residual = residual;
  c.tolerance = tolerance;
  c.bound = bound;
  c.detail = std::move(detail);
  switch (bound) {
    case Bound::at_most:
      c.pass = residual <= tolerance;
      break;
    case Bound::below:
      c.pass = residual < tolerance;
      break;
    case Bound::at_least:
      c.pass = residual >= tolerance;
      break;
  }
  return c;
}

// ---------------------------------------------------------------- model data

CheckResult check_cocycle_invariants(const TransportEngine& engine, const BatteryOptions&) {
  std::vector<std::string> v = engine.base().violations();
  for (auto& s : engine.profiles().spec().violations()) v.push_back(std::move(s));
  std::string detail;
  for (const auto& s : v) detail += (detail.empty() ? "" : "; ") + s;
  return make_check("model_invariants", 1, static_cast<double>(v.size()), 0.0, detail.empty() ? "all hold" : detail);
}

CheckResult check_star_points(const TransportEngine& engine, const BatteryOptions& opt) {
  const StarPointReport r =
      validate_star_points(engine.base(), engine.profiles().spec(), opt.star_horizon, opt.star_margin);
  return make_check("star_points", static_cast<std::size_t>(2 * opt.star_horizon + 1), r.min_margin, opt.star_margin,
                    "worst m = " + std::to_string(r.worst_m) + " at star " + std::to_string(r.worst_star),
                    Bound::at_least);
}

CheckResult check_r_antisymmetry(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "r_antisymmetry");
  std::vector<CirclePoint> xs(opt.samples);
  for (auto& x : xs) x = s.point();
  const auto& base = engine.base();
  const auto res = map_indices<double>(xs.size(), opt.exec, [&](std::size_t i) {
    return std::abs(base.r(xs[i] + CirclePoint::half()) + base.r(xs[i]));
  });
  return make_check("r_antisymmetry", xs.size(), max_of(res), 0x1p-50);
}

CheckResult check_r_range(const TransportEngine& engine, const BatteryOptions& opt) {
  const std::size_t grid = opt.samples;
  const auto vals = map_indices<double>(grid, opt.exec, [&](std::size_t i) {
    return engine.base().r(CirclePoint::from_ratio(static_cast<std::int64_t>(i + 1), 2 * (grid + 1)));
  });
  const double lo = *std::min_element(vals.begin(), vals.end());
  return make_check("r_range", grid, max_of(vals), 0.25, "max of r on (0,1/2); min = " + fmt(lo), Bound::below);
}

CheckResult check_profile_invariance(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "profile_invariance");
  const auto& spec = engine.profiles().spec();
  std::vector<CirclePoint> xs(opt.samples);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // half of the samples land inside the first bump
    xs[i] = (i % 2 == 0) ? spec.bump_lo + CirclePoint::from_raw(static_cast<std::uint64_t>(
                                              s.unit() * static_cast<double>((spec.bump_hi - spec.bump_lo).raw())))
                         : s.point();
  }
  xs.push_back(spec.x1_star);
  const Profiles& p = engine.profiles();
  const auto res = map_indices<double>(xs.size(), opt.exec, [&](std::size_t i) {
    const CirclePoint x = xs[i];
    const CirclePoint px = x + CirclePoint::half();
    return std::max(std::abs(p.phi(px) - (1.0 - p.phi(x))), std::abs(p.psi(px) - (1.0 - p.psi(x))));
  });
  return make_check("profile_invariance", xs.size(), max_of(res), 0.0);
}

CheckResult check_coboundary_growth(const TransportEngine& engine, const BatteryOptions& opt) {
  const std::size_t k = engine.base().spec().harmonics.size();
  const CoboundaryReport r = coboundary_diagnostic(engine.base(), k, opt.coboundary_factor);
  std::string detail = "G =";
  for (double g : r.partial_sums) detail += " " + fmt(g);
  const double worst = r.ratios.empty() ? 0.0 : *std::min_element(r.ratios.begin(), r.ratios.end());
  return make_check("coboundary_growth", k, worst, opt.coboundary_factor, detail, Bound::at_least);
}

// ---------------------------------------------------------------- measures

CheckResult check_symmetry(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "symmetry");
  std::vector<FiberQuery> q(opt.samples);
  for (auto& v : q) v = {s.point(), s.lift()};
  if (!q.empty()) q.front().y = Lift::zero();
  const auto& m = engine.measures();
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const double a = m.cdf(q[i].x, q[i].y).value;
    const double b = m.cdf(q[i].x + CirclePoint::half(), reflect(q[i].y)).value;
    return std::abs(a + b - 1.0);
  });
  const double tol = std::ldexp(1.0, -engine.truncation()) + opt.tol;
  return make_check("symmetry", q.size(), max_of(res), tol, "|F_x(y) + F_{x+1/2}(1-y) - 1|");
}

CheckResult check_complement(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "complement");
  struct Sample {
    CirclePoint x, a, b;
  };
  std::vector<Sample> q(opt.samples);
  for (auto& v : q) v = {s.point(), s.point(), s.point()};
  const auto& m = engine.measures();
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const auto& v = q[i];
    const double lhs = m.mu0(v.x, arc_from(v.a, v.b));
    const double rhs = m.mu0(v.x + CirclePoint::half(), arc_from(-v.a, -v.b));
    return std::abs(lhs + rhs - 1.0);
  });
  return make_check("mu0_complement", q.size(), max_of(res), 1e-12, "mu0_x[a,b] + mu0_{x+1/2}[1-a,1-b] - 1");
}

CheckResult check_additivity(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "additivity");
  struct Sample {
    CirclePoint x, a, b;
    double t;
  };
  std::vector<Sample> q(opt.samples);
  for (auto& v : q) v = {s.point(), s.point(), s.point(), s.unit()};
  const auto& m = engine.measures();
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const auto& v = q[i];
    const auto len = static_cast<double>((v.b - v.a).raw());
    const CirclePoint c = v.a + CirclePoint::from_raw(static_cast<std::uint64_t>(v.t * len));
    // the closed pieces share the point c, which carries no mass off the atom fibers
    const double whole = m.mu0(v.x, arc_from(v.a, v.b));
    return std::abs(whole - m.mu0(v.x, arc_from(v.a, c)) - m.mu0(v.x, arc_from(c, v.b)));
  });
  return make_check("mu0_additivity", q.size(), max_of(res), opt.tol);
}

CheckResult check_cdf_slope(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "cdf_slope");
  struct Sample {
    CirclePoint x;
    Lift lo, hi;
  };
  std::vector<Sample> q(opt.samples);
  for (auto& v : q) {
    Lift a = s.lift(), b = s.lift();
    if (b < a) std::swap(a, b);
    v = {s.point(), a, b};
  }
  const auto& m = engine.measures();
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const auto f = m.fiber(q[i].x);
    const double rise = f(q[i].hi).value - f(q[i].lo).value;
    return 0.5 * (q[i].hi.to_double() - q[i].lo.to_double()) - rise;
  });
  const double gap = std::ldexp(1.0, -engine.truncation() - 1);
  return make_check("cdf_slope", q.size(), max_of(res), 2.0 * gap + 1e-12, "(y2 - y1)/2 - (F(y2) - F(y1))");
}

CheckResult check_semicontinuity(const TransportEngine& engine, const BatteryOptions& opt) {
  const auto& spec = engine.profiles().spec();
  const auto& m = engine.measures();
  constexpr double kWidth = 0.01;
  constexpr double kStart = 1e-3;
  constexpr int kDepth = 30;
  constexpr int kTail = 20;
  const CirclePoint w = CirclePoint::from_double(kWidth);
  struct Limit {
    CirclePoint x, a, b;
    bool star;
  };
  std::vector<Limit> limits;
  for (const auto& [x, y] : {std::pair{spec.x1_star, spec.y1_star_point()}, std::pair{spec.x2_star(), spec.y2_star_point()}}) {
    for (const auto& [a, b] : {std::pair{y - w, y + w}, std::pair{y, y + w}, std::pair{y - w, y}, std::pair{y + w, y + w + w}}) {
      limits.push_back({x, a, b, true});
    }
  }
  Sampler s(opt.seed, "semicontinuity");
  while (limits.size() < 16) {
    const CirclePoint x = spec.bump_lo + CirclePoint::from_raw(static_cast<std::uint64_t>(
                                             s.unit() * static_cast<double>((spec.bump_hi - spec.bump_lo).raw())));
    if (x == spec.x1_star) continue;
    const CirclePoint a = s.point();
    limits.push_back({x, a, a + CirclePoint::from_double(0.5 * s.unit()), false});
  }
  // Star limits: limsup of the approaching values stays below the limit value.
  // Ordinary limits: the approaching values converge.
  const auto res = map_indices<double>(limits.size(), opt.exec, [&](std::size_t i) {
    const Limit& l = limits[i];
    const double at_limit = m.mu0(l.x, arc_from(l.a, l.b));
    double worst = -1.0;
    for (int k = kTail; k <= kDepth; ++k) {
      const double h = std::ldexp(kStart, -k);
      for (double sx : {-1.0, 1.0}) {
        for (double sy : {-1.0, 1.0}) {
          const CirclePoint e = CirclePoint::from_double(sy * h);
          const double v = m.mu0(l.x + CirclePoint::from_double(sx * h), arc_from(l.a + e, l.b - e));
          const double excess = l.star ? v - at_limit : std::abs(v - at_limit) - 1e-6;
          worst = std::max(worst, excess);
        }
      }
    }
    return worst;
  });
  return make_check("semicontinuity", limits.size() * 4 * (kDepth - kTail + 1), max_of(res), opt.tol,
                    "limsup mu0 at star points; convergence elsewhere");
}

CheckResult check_cdf_oracle(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "cdf_oracle");
  const CdfOracle oracle(engine.base().spec(), engine.profiles().spec(), engine.truncation(), opt.oracle_cells);
  std::vector<std::pair<double, double>> q(opt.oracle_samples);
  for (auto& v : q) v = {s.unit(), s.unit()};
  const auto& m = engine.measures();
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const double fast = m.cdf(CirclePoint::from_double(q[i].first), Lift::from_double(q[i].second)).value;
    return std::abs(fast - oracle(q[i].first, q[i].second));
  });
  return make_check("cdf_oracle", q.size(), max_of(res), opt.oracle_tol,
                    "midpoint rule, " + std::to_string(opt.oracle_cells) + " cells per component");
}

CheckResult check_truncation_bracket(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "truncation_bracket");
  std::vector<FiberQuery> q(opt.oracle_samples);
  for (auto& v : q) v = {s.point(), s.lift()};
  const auto& m = engine.measures();
  constexpr int kCoarse = 3;
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const CdfValue coarse = m.cdf(q[i].x, q[i].y, kCoarse);
    const double fine = m.cdf(q[i].x, q[i].y).value;
    return std::max(coarse.value - fine, fine - (coarse.value + coarse.truncation_gap));
  });
  return make_check("truncation_bracket", q.size(), max_of(res), opt.tol,
                    "F^3 <= F^N <= F^3 + 2^-4");
}

// ---------------------------------------------------------------- tau and T

CheckResult check_quantile_roundtrip(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "quantile_roundtrip");
  std::vector<std::pair<CirclePoint, double>> q(opt.samples);
  for (auto& v : q) v = {s.point(), s.unit()};
  const auto res = map_indices<double>(q.size(), opt.exec, [&](std::size_t i) {
    const FiberCdf f = engine.fiber(q[i].first);
    return std::abs(f(engine.tau(f, q[i].second)).value - q[i].second);
  });
  return make_check("quantile_roundtrip", q.size(), max_of(res), opt.tol, "|F_x(tau_x(y)) - y|");
}

CheckResult check_generalized_inverse(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "generalized_inverse");
  auto pts = torus_samples(s, opt.samples, [](TorusPoint z) { return z; });
  // include the atom fibers, where tau is constant across a whole jump
  const auto& spec = engine.profiles().spec();
  for (int k = 0; k < 4; ++k) {
    pts.push_back({spec.x1_star - engine.base().alpha().times(k), s.point()});
    pts.push_back({spec.x2_star() - engine.base().alpha().times(k), s.point()});
  }
  const double step = 2.0 * TransportEngine::bisect_tol();
  const auto step_raw = static_cast<uint128>(std::ldexp(1.0, 64) * step);
  const auto res = map_indices<double>(pts.size(), opt.exec, [&](std::size_t i) {
    const FiberCdf f = engine.fiber(pts[i].x);
    const double level = level_of(pts[i].y);
    const Lift t = engine.tau(f, level);
    double worst = level - f(t).value;
    if (t.raw() >= step_raw) worst = std::max(worst, f(Lift::from_raw(t.raw() - step_raw)).value - level);
    return worst;
  });
  return make_check("generalized_inverse", pts.size(), max_of(res), opt.tol,
                    "F(tau) >= y - tol and F(tau - 2^-51) < y + tol");
}

CheckResult check_tau_endpoints(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "tau_endpoints");
  std::vector<CirclePoint> xs(opt.samples);
  for (auto& x : xs) x = s.point();
  xs.push_back(engine.profiles().spec().x1_star);
  xs.push_back(engine.profiles().spec().x2_star());
  const auto res = map_indices<double>(xs.size(), opt.exec, [&](std::size_t i) {
    const FiberCdf f = engine.fiber(xs[i]);
    return (engine.tau(f, 0.0) == Lift::zero() ? 0.0 : 1.0) + (engine.tau(f, 1.0).is_one() ? 0.0 : 1.0);
  });
  double bad = 0;
  for (double v : res) bad += v;
  return make_check("tau_endpoints", xs.size(), bad, 0.0, "count of tau(0) != 0 or tau(1) != 1");
}

CheckResult check_t_commutation(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "t_commutation");
  const auto pts = torus_samples(s, opt.samples, [](TorusPoint z) { return z; });
  const auto res = map_indices<double>(pts.size(), opt.exec, [&](std::size_t i) {
    return torus_dist(engine.t_map(involution(pts[i])), involution(engine.t_map(pts[i])));
  });
  return make_check("t_commutation", pts.size(), max_of(res), opt.tol, "d(T(Pz), P(T z))");
}

CheckResult check_t_monotone(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "t_monotone");
  constexpr std::size_t kFibers = 10;
  const std::size_t per = std::max<std::size_t>(opt.samples / kFibers, 2);
  std::vector<CirclePoint> xs(kFibers);
  for (auto& x : xs) x = s.point();
  const auto res = map_indices<double>(kFibers, opt.exec, [&](std::size_t i) {
    const FiberCdf f = engine.fiber(xs[i]);
    double bad = 0;
    Lift prev = engine.tau(f, 0.5 / static_cast<double>(per + 1));
    for (std::size_t j = 2; j <= per; ++j) {
      const Lift t = engine.tau(f, (static_cast<double>(j) - 0.5) / static_cast<double>(per + 1));
      if (!(prev < t)) bad += 1;
      prev = t;
    }
    return bad;
  });
  double bad = 0;
  for (double v : res) bad += v;
  return make_check("t_monotone", kFibers * per, bad, 0.0, "non-increasing steps of tau on generic fibers");
}

// ---------------------------------------------------------------- maps

CheckResult check_semiconjugacy(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "semiconjugacy");
  auto pts = torus_samples(s, opt.samples, [](TorusPoint z) { return z; });
  add_special_points(engine, pts);
  const auto res = map_indices<double>(pts.size(), opt.exec, [&](std::size_t i) {
    return torus_dist(engine.t_map(engine.s_hat(pts[i])), engine.base().step(engine.t_map(pts[i])));
  });
  return make_check("semiconjugacy", pts.size(), max_of(res), opt.tol, "d(T(S_hat z), S(T z))");
}

CheckResult check_commutation(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "commutation");
  auto pts = torus_samples(s, opt.samples, [](TorusPoint z) { return z; });
  add_special_points(engine, pts);
  const auto res = map_indices<double>(pts.size(), opt.exec, [&](std::size_t i) {
    return torus_dist(engine.s_hat(involution(pts[i])), involution(engine.s_hat(pts[i])));
  });
  return make_check("commutation", pts.size(), max_of(res), opt.tol, "d(S_hat(Pz), P(S_hat z))");
}

CheckResult check_klein_well_defined(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "klein_well_defined");
  auto pts = torus_samples(s, opt.samples, [](TorusPoint z) { return z; });
  add_special_points(engine, pts);
  const auto res = map_indices<double>(pts.size(), opt.exec, [&](std::size_t i) {
    const KleinPoint a = project(engine.s_hat(pts[i]));
    const KleinPoint b = project(engine.s_hat(involution(pts[i])));
    return std::max(klein_dist(a, b), klein_dist(s_tilde(engine, project(pts[i])), a));
  });
  return make_check("klein_well_defined", pts.size(), max_of(res), opt.tol, "d(pi S_hat z, pi S_hat Pz)");
}

CheckResult check_fiber_preservation(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "fiber_preservation");
  const auto pts = torus_samples(s, opt.samples, [](TorusPoint z) { return z; });
  const auto res = map_indices<double>(pts.size(), opt.exec, [&](std::size_t i) {
    return engine.s_hat(pts[i]).x == engine.base().rotate(pts[i].x) ? 0.0 : 1.0;
  });
  double bad = 0;
  for (double v : res) bad += v;
  return make_check("fiber_preservation", pts.size(), bad, 0.0, "count of S_hat(z).x != x + alpha");
}

CheckResult check_injectivity(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "injectivity");
  constexpr std::size_t kFibers = 10;
  const std::size_t per = std::max<std::size_t>(opt.samples / kFibers, 2);
  std::vector<CirclePoint> xs;
  while (xs.size() < kFibers) {
    const CirclePoint x = s.point();
    if (outside_bumps(engine.profiles(), x)) xs.push_back(x);
  }
  const auto res = map_indices<double>(kFibers, opt.exec, [&](std::size_t i) {
    double worst = -1.0;
    double prev_in = 0, prev_out = 0;
    for (std::size_t j = 0; j < per; ++j) {
      const double level = (static_cast<double>(j) + 0.5) / static_cast<double>(per);
      const TorusPoint img = engine.s_hat({xs[i], CirclePoint::from_double(level)});
      const double out = img.y.to_double();
      if (j > 0) {
        // forward gap on the circle: the fiber map preserves orientation
        const double gap_out = std::fmod(out - prev_out + 1.0, 1.0);
        worst = std::max(worst, 0.5 * (level - prev_in) - gap_out);
      }
      prev_in = level;
      prev_out = out;
    }
    return worst;
  });
  return make_check("injectivity", kFibers * per, max_of(res), opt.tol,
                    "gap/2 - image gap on fibers outside the bumps");
}

// ---------------------------------------------------------------- collapse

namespace {

TorusPoint collapse_image(const TransportEngine& engine, double level) {
  return engine.s_hat({engine.profiles().spec().x1_star, CirclePoint::from_double(level)});
}

double star_level(const TransportEngine& engine) {
  const auto& spec = engine.profiles().spec();
  return engine.measures().cdf(spec.x1_star, Lift::from_point(spec.y1_star_point())).value;
}

}  // namespace

CheckResult check_collapse_atom(const TransportEngine& engine, const BatteryOptions& opt) {
  const auto& spec = engine.profiles().spec();
  const double mass = engine.measures().atom_mass(spec.x1_star, spec.y1_star_point());
  return make_check("collapse_atom", 1, mass, 0.25 - opt.tol, "atom mass of mu at z1*", Bound::at_least);
}

CheckResult check_collapse_coincidence(const TransportEngine& engine, const BatteryOptions& opt) {
  const double y1 = star_level(engine);
  const TorusPoint ref = collapse_image(engine, y1);
  double worst = 0;
  for (double d : {0.05, 0.10, 0.20, 0.24}) worst = std::max(worst, torus_dist(collapse_image(engine, y1 - d), ref));
  return make_check("collapse_coincidence", 4, worst, opt.tol,
                    "d(S_hat(x1*, y1 - d), S_hat(x1*, y1)), d in {0.05, 0.10, 0.20, 0.24}; y1 = " + fmt(y1));
}

CheckResult check_collapse_separation(const TransportEngine& engine, const BatteryOptions&) {
  const double y1 = star_level(engine);
  const double d = torus_dist(collapse_image(engine, y1 - 0.30), collapse_image(engine, y1));
  return make_check("collapse_separation", 1, d, 0.01, "d(S_hat(x1*, y1 - 0.30), S_hat(x1*, y1))", Bound::at_least);
}

// ---------------------------------------------------------------- continuity

double theta(const TransportEngine& engine, int n, CirclePoint x) {
  const std::int64_t r = engine.base().r_raw(x);
  const CirclePoint minus_r = -engine.base().r_shift(x);
  const Arc a = r >= 0 ? arc_from(minus_r, CirclePoint{}) : arc_from(CirclePoint{}, minus_r);
  return engine.measures().mun(x, n, a);
}

namespace {

double max_jump(const TransportEngine& engine, int n, std::size_t grid, Execution exec) {
  const auto vals = map_indices<double>(grid, exec, [&](std::size_t i) {
    return theta(engine, n, CirclePoint::from_ratio(static_cast<std::int64_t>(i), grid));
  });
  double worst = 0;
  for (std::size_t i = 0; i < grid; ++i) worst = std::max(worst, std::abs(vals[(i + 1) % grid] - vals[i]));
  return worst;
}

}  // namespace

CheckResult check_theta_continuity(const TransportEngine& engine, const BatteryOptions& opt) {
  double worst = 0;
  std::string detail = "max jump per order:";
  for (int n : opt.theta_orders) {
    const double j = max_jump(engine, n, opt.theta_grid, opt.exec);
    worst = std::max(worst, j);
    detail += " " + std::to_string(n) + "=" + fmt(j);
  }
  return make_check("theta_continuity", opt.theta_grid * opt.theta_orders.size(), worst, opt.theta_modulus, detail);
}

CheckResult check_theta_endpoints(const TransportEngine& engine, const BatteryOptions& opt) {
  double worst = 0;
  for (int n : opt.theta_orders) {
    worst = std::max(worst, std::abs(theta(engine, n, CirclePoint{})));
    worst = std::max(worst, std::abs(theta(engine, n, CirclePoint::half())));
  }
  return make_check("theta_endpoints", 2 * opt.theta_orders.size(), worst, opt.tol, "theta_n(0), theta_n(1/2)");
}

CheckResult check_theta_refinement(const TransportEngine& engine, const BatteryOptions& opt) {
  double worst = 0;
  std::string detail = "jump ratio (10x finer grid):";
  for (int n : opt.theta_orders) {
    const double coarse = max_jump(engine, n, opt.theta_grid, opt.exec);
    const double fine = max_jump(engine, n, 10 * opt.theta_grid, opt.exec);
    const double ratio = coarse > 0 ? fine / coarse : 0.0;
    worst = std::max(worst, ratio);
    detail += " " + std::to_string(n) + "=" + fmt(ratio);
  }
  return make_check("theta_refinement", 11 * opt.theta_grid * opt.theta_orders.size(), worst, 0.5, detail);
}

std::vector<double> oscillation_profile(const TransportEngine& engine, TorusPoint center, double h,
                                        bool direct_formula, std::size_t probes, std::uint64_t seed) {
  Sampler s(seed, "oscillation");
  std::vector<std::pair<double, double>> offsets(probes);
  for (auto& o : offsets) o = {2.0 * s.unit() - 1.0, 2.0 * s.unit() - 1.0};
  auto f = [&](TorusPoint z) { return direct_formula ? engine.s_hat_direct(z) : engine.s_hat(z); };
  const TorusPoint ref = f(center);
  std::vector<double> out;
  for (int level = 0; level < 5; ++level) {
    const double w = std::ldexp(h, -level);
    double osc = 0;
    for (const auto& [dx, dy] : offsets) {
      const TorusPoint p{center.x + CirclePoint::from_double(w * dx), center.y + CirclePoint::from_double(w * dy)};
      osc = std::max(osc, torus_dist(f(p), ref));
    }
    out.push_back(osc);
  }
  return out;
}

namespace {

// A level in the middle of the atom jump that fiber x carries at lift a.
double mid_jump_level(const TransportEngine& engine, CirclePoint x) {
  const FiberCdf f = engine.fiber(x);
  if (f.atoms().empty()) return 0.5;
  const Lift a = f.atoms().front().position;
  return 0.5 * (f.left_limit(a) + f(a).value);
}

}  // namespace

CheckResult check_s_hat_continuity(const TransportEngine& engine, const BatteryOptions& opt) {
  Sampler s(opt.seed, "s_hat_continuity");
  const auto& spec = engine.profiles().spec();
  const CirclePoint alpha = engine.base().alpha();
  std::vector<TorusPoint> centers;
  for (int i = 0; i < 6; ++i) centers.push_back(s.torus());
  for (CirclePoint x : {spec.x1_star, spec.x1_star - alpha, spec.x2_star() - alpha.times(2)}) {
    centers.push_back({x, CirclePoint::from_double(mid_jump_level(engine, x))});
  }
  constexpr double kBox = 1e-3;
  const auto profiles = map_indices<std::vector<double>>(
      centers.size(), opt.exec, [&](std::size_t i) { return oscillation_profile(engine, centers[i], kBox); });
  // Continuity: the oscillation at the finest scale is at most half of the
  // coarsest; a jump keeps it flat.
  double worst = 0;
  for (const auto& p : profiles) worst = std::max(worst, p.back() - 0.5 * p.front());
  return make_check("s_hat_continuity", centers.size() * 64 * 5, worst, opt.tol,
                    "osc(h/16) - osc(h)/2 around generic and atom-fiber points");
}

// ---------------------------------------------------------------- density

bool DensityReport::non_decreasing() const {
  for (std::size_t i = 1; i < covered.size(); ++i) {
    if (covered[i] < covered[i - 1]) return false;
  }
  return true;
}

namespace {

// Largest Chebyshev distance (in fine cells) from an empty cell to the nearest
// occupied one; `klein` glues the x-edges with a flip of y.
double empty_radius(const std::vector<char>& occupied, std::size_t cols, std::size_t rows, bool klein) {
  std::vector<int> dist(occupied.size(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    if (occupied[i]) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  if (queue.empty()) return 0.5;
  int worst = 0;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const auto cx = static_cast<std::int64_t>(cur / rows);
    const auto cy = static_cast<std::int64_t>(cur % rows);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        std::int64_t nx = cx + dx;
        std::int64_t ny = cy + dy;
        const auto c = static_cast<std::int64_t>(cols);
        const auto r = static_cast<std::int64_t>(rows);
        ny = ((ny % r) + r) % r;
        if (nx < 0 || nx >= c) {
          nx = ((nx % c) + c) % c;
          if (klein) ny = r - 1 - ny;
        }
        const auto idx = static_cast<std::size_t>(nx) * rows + static_cast<std::size_t>(ny);
        if (dist[idx] < 0) {
          dist[idx] = dist[cur] + 1;
          worst = std::max(worst, dist[idx]);
          queue.push_back(idx);
        }
      }
    }
  }
  return static_cast<double>(worst) / static_cast<double>(rows);
}

}  // namespace

DensityReport density_report(const TransportEngine& engine, MapId map, TorusPoint z0, std::size_t steps, double eps,
                             std::size_t fine_resolution) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("density eps must lie in (0, 1/2]");
  const bool klein = map == MapId::klein;
  DensityReport rep;
  rep.space = klein ? "klein" : "torus";
  rep.eps = eps;
  rep.rows = static_cast<std::size_t>(std::ceil(1.0 / eps - 1e-12));
  rep.columns = klein ? static_cast<std::size_t>(std::ceil(0.5 / eps - 1e-12)) : rep.rows;
  const double width = klein ? 0.5 : 1.0;
  const std::size_t fine_rows = fine_resolution;
  const std::size_t fine_cols = klein ? fine_resolution / 2 : fine_resolution;

  std::vector<std::size_t> marks;
  if (steps == 0) {
    marks.push_back(0);
  } else {
    for (std::size_t i = 1; i <= 10; ++i) marks.push_back(std::max<std::size_t>(i * steps / 10, 1));
  }
  std::vector<char> cells(rep.columns * rep.rows, 0);
  std::vector<char> fine(fine_cols * fine_rows, 0);
  std::size_t covered = 0;
  std::size_t next = 0;
  auto visit = [&](std::size_t n, TorusPoint z) {
    const double x = z.x.to_double();
    const double y = z.y.to_double();
    const auto cx = std::min(static_cast<std::size_t>(x / width * static_cast<double>(rep.columns)), rep.columns - 1);
    const auto cy = std::min(static_cast<std::size_t>(y * static_cast<double>(rep.rows)), rep.rows - 1);
    char& c = cells[cx * rep.rows + cy];
    if (!c) {
      c = 1;
      ++covered;
    }
    const auto fx = std::min(static_cast<std::size_t>(x / width * static_cast<double>(fine_cols)), fine_cols - 1);
    const auto fy = std::min(static_cast<std::size_t>(y * static_cast<double>(fine_rows)), fine_rows - 1);
    fine[fx * fine_rows + fy] = 1;
    while (next < marks.size() && marks[next] == n) {
      rep.checkpoints.push_back(n);
      rep.covered.push_back(covered);
      rep.fraction.push_back(static_cast<double>(covered) / static_cast<double>(rep.total_cells()));
      ++next;
    }
  };
  if (klein) {
    for_each_klein_orbit_point(engine, project(z0), steps, [&](std::size_t n, KleinPoint k) { visit(n, k.rep); });
  } else {
    engine.for_each_orbit_point(map, z0, steps, visit);
  }
  rep.max_empty_radius = empty_radius(fine, fine_cols, fine_rows, klein);
  return rep;
}

CheckResult check_density(const DensityReport& report, const BatteryOptions& opt) {
  std::string detail = "covered";
  for (std::size_t i = 0; i < report.covered.size(); ++i) {
    detail += " " + std::to_string(report.checkpoints[i]) + ":" + std::to_string(report.covered[i]);
  }
  detail += " of " + std::to_string(report.total_cells()) + "; max empty radius " + fmt(report.max_empty_radius);
  if (!report.non_decreasing()) detail += "; coverage decreased";
  CheckResult c = make_check(report.space == "klein" ? "density_s_tilde" : "density_s_hat",
                             report.checkpoints.empty() ? 0 : report.checkpoints.back() + 1, report.final_fraction(),
                             opt.coverage_min, detail, Bound::at_least);
  c.pass = c.pass && report.non_decreasing();
  return c;
}

// ---------------------------------------------------------------- report

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string VerificationReport::text() const {
  std::ostringstream os;
  os << "minimal-bottle verification report\n";
  os << "truncation_N = " << truncation << "\n";
  os << "seed = " << seed << "\n";
  os << "checks = " << checks.size() << "\n\n";
  for (const auto& c : checks) {
    os << "[" << c.name << "]\n";
    os << "  samples  = " << c.samples << "\n";
    os << "  residual = " << fmt(c.residual) << "\n";
    os << "  require  = residual " << bound_symbol(c.bound) << " " << fmt(c.tolerance) << "\n";
    os << "  verdict  = " << (c.pass ? "pass" : "FAIL") << "\n";
    if (!c.detail.empty()) os << "  detail   = " << c.detail << "\n";
  }
  for (const auto& d : density) {
    os << "\n[density " << d.space << "]\n";
    os << "  grid = " << d.columns << " x " << d.rows << " (eps = " << fmt(d.eps) << ")\n";
    for (std::size_t i = 0; i < d.checkpoints.size(); ++i) {
      os << "  step " << d.checkpoints[i] << ": " << d.covered[i] << " cells, fraction " << fmt(d.fraction[i]) << "\n";
    }
    os << "  max_empty_radius = " << fmt(d.max_empty_radius) << "\n";
  }
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;
  os << "\nfailed = " << failed << "\n";
  os << "verdict = " << (pass() ? "pass" : "FAIL") << "\n";
  return os.str();
}

std::string VerificationReport::csv() const {
  std::string out = "name,samples,residual,tol,verdict\n";
  for (const auto& c : checks) {
    out += c.name + "," + std::to_string(c.samples) + "," + fmt(c.residual) + "," + fmt(c.tolerance) + "," +
           (c.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

VerificationReport run_battery(const TransportEngine& engine, const BatteryOptions& opt,
                               const std::vector<std::string>& config_violations) {
  VerificationReport rep;
  rep.truncation = engine.truncation();
  rep.seed = opt.seed;
  if (!config_violations.empty()) {
    std::string detail;
    for (const auto& v : config_violations) detail += (detail.empty() ? "" : "; ") + v;
    rep.checks.push_back(make_check("config_invariants", config_violations.size(),
                                    static_cast<double>(config_violations.size()), 0.0, detail));
  }
  using Check = CheckResult (*)(const TransportEngine&, const BatteryOptions&);
  static constexpr Check kChecks[] = {
      check_cocycle_invariants, check_star_points,        check_r_antisymmetry,     check_r_range,
      check_profile_invariance, check_coboundary_growth,  check_symmetry,           check_complement,
      check_additivity,         check_cdf_slope,  check_semicontinuity,        check_cdf_oracle,         check_truncation_bracket,
      check_quantile_roundtrip, check_generalized_inverse, check_tau_endpoints,     check_t_commutation,
      check_t_monotone,         check_semiconjugacy,      check_commutation,        check_klein_well_defined,
      check_fiber_preservation, check_injectivity,        check_collapse_atom,      check_collapse_coincidence,
      check_collapse_separation, check_theta_continuity,  check_theta_endpoints,    check_theta_refinement,
      check_s_hat_continuity,
  };
  for (Check c : kChecks) rep.checks.push_back(c(engine, opt));
  for (MapId map : {MapId::blown_up, MapId::klein}) {
    rep.density.push_back(density_report(engine, map, opt.orbit_seed, opt.orbit_length, opt.density_eps));
    rep.checks.push_back(check_density(rep.density.back(), opt));
  }
  return rep;
}

}  // namespace minimal_bottle
