#pragma once

// Property battery: every testable identity of the construction evaluated on
// seeded samples, with residuals, tolerances and verdicts.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "minimal_bottle/kernels.hpp"
#include "minimal_bottle/klein.hpp"
#include "minimal_bottle/transport.hpp"

namespace minimal_bottle {

/// at_most: residual <= tol; below: residual < tol; at_least: residual >= tol.
enum class Bound { at_most, below, at_least };

struct CheckResult {
  std::string name;
  std::size_t samples = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::at_most;
  bool pass = false;
  std::string detail;
};

CheckResult make_check(std::string name, std::size_t samples, double residual, double tolerance,
                       std::string detail = {}, Bound bound = Bound::at_most);

struct DensityReport {
  std::string space;  // "torus" or "klein"
  double eps = 0.05;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::vector<std::size_t> checkpoints;  // orbit step index at each checkpoint
  std::vector<std::size_t> covered;      // covered eps-cells up to that step
  std::vector<double> fraction;
  double max_empty_radius = 0.0;  // from a fine occupancy grid

  std::size_t total_cells() const { return columns * rows; }
  double final_fraction() const { return fraction.empty() ? 0.0 : fraction.back(); }
  bool non_decreasing() const;
};

/// Coverage of an eps-grid by the orbit of z0 under S_hat (torus) or S_tilde
/// (canonical domain [0,1/2) x [0,1)), at checkpoints K/10, 2K/10, ..., K.
DensityReport density_report(const TransportEngine& engine, MapId map, TorusPoint z0, std::size_t steps, double eps,
                             std::size_t fine_resolution = 256);

struct BatteryOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  double tol = 1e-9;
  double oracle_tol = 1e-3;
  std::size_t oracle_samples = 100;
  std::size_t oracle_cells = 10000;
  std::size_t orbit_length = 100000;
  double density_eps = 0.05;
  double coverage_min = 0.95;
  TorusPoint orbit_seed{CirclePoint::from_ratio(3, 10), CirclePoint::from_ratio(2, 5)};
  std::int64_t star_horizon = 10000;
  double star_margin = 1e-9;
  std::vector<int> theta_orders{0, 1, 2, 3, 5, 10};
  std::size_t theta_grid = 10000;
  double theta_modulus = 0.05;
  double coboundary_factor = 10.0;
  Execution exec = Execution::parallel;
};

CheckResult check_cocycle_invariants(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_star_points(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_r_antisymmetry(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_r_range(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_profile_invariance(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_coboundary_growth(const TransportEngine& engine, const BatteryOptions& opt);

CheckResult check_symmetry(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_complement(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_additivity(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_cdf_slope(const TransportEngine& engine, const BatteryOptions& opt);
/// Limit behaviour of mu0 over closed arcs around the star points and away from them.
CheckResult check_semicontinuity(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_cdf_oracle(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_truncation_bracket(const TransportEngine& engine, const BatteryOptions& opt);

CheckResult check_quantile_roundtrip(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_generalized_inverse(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_tau_endpoints(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_t_commutation(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_t_monotone(const TransportEngine& engine, const BatteryOptions& opt);

CheckResult check_semiconjugacy(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_commutation(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_klein_well_defined(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_fiber_preservation(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_injectivity(const TransportEngine& engine, const BatteryOptions& opt);

/// (a) atom mass at z1*, (b) S_hat(x1*, y1 - delta) = S_hat(x1*, y1) for
/// delta in {0.05, 0.10, 0.20, 0.24}, (c) separation at delta = 0.30.
CheckResult check_collapse_atom(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_collapse_coincidence(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_collapse_separation(const TransportEngine& engine, const BatteryOptions& opt);

/// theta_n(x) = mu_x^n of the short arc between -r(x) and 0.
double theta(const TransportEngine& engine, int n, CirclePoint x);
CheckResult check_theta_continuity(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_theta_endpoints(const TransportEngine& engine, const BatteryOptions& opt);
CheckResult check_theta_refinement(const TransportEngine& engine, const BatteryOptions& opt);

/// Sampled oscillation of `map` over boxes of half-width h, h/2, ..., h/16.
std::vector<double> oscillation_profile(const TransportEngine& engine, TorusPoint center, double h,
                                        bool direct_formula = false, std::size_t probes = 64, std::uint64_t seed = 7);
CheckResult check_s_hat_continuity(const TransportEngine& engine, const BatteryOptions& opt);

CheckResult check_density(const DensityReport& report, const BatteryOptions& opt);

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<DensityReport> density;
  int truncation = 0;
  std::uint64_t seed = 0;

  bool pass() const;
  const CheckResult* find(const std::string& name) const;
  std::string text() const;
  /// One row per check: name,samples,residual,tol,verdict.
  std::string csv() const;
};

/// The full battery. `config_violations` (from configuration loading) is
/// reported as its own failing check when non-empty.
VerificationReport run_battery(const TransportEngine& engine, const BatteryOptions& opt,
                               const std::vector<std::string>& config_violations = {});

}  // namespace minimal_bottle
