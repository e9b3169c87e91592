#pragma once

// Subcommand bodies behind the minimal-bottle CLI: orbit and CDF tables,
// SVG figures and the verification reports.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minimal_bottle/config.hpp"
#include "minimal_bottle/kernels.hpp"
#include "minimal_bottle/transport.hpp"
#include "minimal_bottle/verify.hpp"

namespace minimal_bottle {

enum class OrbitMap { s, s_hat, s_tilde };

/// Accepts S, Shat, Stilde (any case); throws std::invalid_argument otherwise.
OrbitMap parse_orbit_map(std::string_view name);
std::string_view orbit_map_name(OrbitMap map);

/// A number reduced mod 1, or "p/q"; throws std::invalid_argument.
CirclePoint parse_circle_point(std::string_view text);

/// 17 significant digits.
std::string csv_number(double v);

/// Nearest double to a circle point, clamped below 1.
double turns(CirclePoint p);

/// Header `step,x,y,space`, one row per orbit point, streamed. Klein rows hold
/// the canonical representative.
void write_orbit_csv(const TransportEngine& engine, OrbitMap map, TorusPoint z0, std::size_t steps, std::ostream& out);

struct OrbitRow {
  std::size_t step = 0;
  double x = 0.0;
  double y = 0.0;
  std::string space;
};

/// Reads a file written by write_orbit_csv; throws std::runtime_error with the line number on bad input.
std::vector<OrbitRow> read_orbit_csv(std::istream& in);

/// Header `y,cdf,truncation_gap` and grid + 1 rows at y = k / grid.
void write_cdf_csv(const TransportEngine& engine, CirclePoint x, std::size_t grid, std::ostream& out,
                   Execution exec = Execution::parallel);

void render_profiles_svg(const TransportEngine& engine, std::ostream& out);
void render_measure_svg(const TransportEngine& engine, CirclePoint x, std::ostream& out);
void render_orbit_svg(const std::vector<OrbitRow>& rows, std::ostream& out);

BatteryOptions battery_options(const SystemConfig& config);

/// Runs the battery on the configured system. Invariant violations become a
/// failing check; an unconstructible engine throws std::invalid_argument.
VerificationReport verify_config(const SystemConfig& config);

/// Writes verification_report.txt and verification_report.csv into dir.
void write_verify_reports(const VerificationReport& report, const std::filesystem::path& dir);

}  // namespace minimal_bottle
