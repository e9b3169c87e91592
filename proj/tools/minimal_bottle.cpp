// minimal-bottle: verification battery, orbits, CDF tables and figures for the
// blown-up Parry skew product and its Klein-bottle quotient.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "minimal_bottle/commands.hpp"
#include "minimal_bottle/config.hpp"

namespace mb = minimal_bottle;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string out;
  std::string map = "Shat";
  std::size_t steps = 1000;
  std::optional<std::string> seed_x;
  std::optional<std::string> seed_y;
  std::optional<std::string> x;
  std::size_t grid = 1000;
  std::string what;
  std::string input;
};

mb::SystemConfig load(const Options& opt) {
  std::string path = opt.config;
  if (path.empty()) {
    if (const char* env = std::getenv("MINIMAL_BOTTLE_CONFIG"); env != nullptr && *env != '\0') path = env;
  }
  mb::SystemConfig config = path.empty() ? mb::SystemConfig{} : mb::load_config(path);
  return config;
}

void require_valid(const mb::SystemConfig& config) {
  const auto v = config.violations();
  if (v.empty()) return;
  std::string msg = "configuration rejected:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

// Writes to --out, or stdout when it is empty.
template <class F>
void emit(const std::string& out, F&& body) {
  if (out.empty() || out == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + out + " for writing");
  body(file);
  if (!file) throw std::runtime_error("failed writing " + out);
}

mb::TorusPoint seed_point(const Options& opt, const mb::SystemConfig& config) {
  mb::TorusPoint z = config.battery.orbit_seed;
  if (opt.seed_x) z.x = mb::parse_circle_point(*opt.seed_x);
  if (opt.seed_y) z.y = mb::parse_circle_point(*opt.seed_y);
  return z;
}

mb::CirclePoint fiber_x(const Options& opt, const mb::SystemConfig& config) {
  return opt.x ? mb::parse_circle_point(*opt.x) : config.profile.x1_star;
}

int run_verify(const Options& opt) {
  const mb::SystemConfig config = load(opt);
  const mb::VerificationReport report = mb::verify_config(config);
  mb::write_verify_reports(report, opt.out.empty() ? config.output_dir : std::filesystem::path(opt.out));
  std::cout << report.text();
  return report.pass() ? kPass : kCheckFailure;
}

int run_orbit(const Options& opt) {
  const mb::SystemConfig config = load(opt);
  require_valid(config);
  const mb::OrbitMap map = mb::parse_orbit_map(opt.map);
  const mb::TransportEngine engine(config.cocycle, config.profile, config.truncation);
  emit(opt.out, [&](std::ostream& os) { mb::write_orbit_csv(engine, map, seed_point(opt, config), opt.steps, os); });
  return kPass;
}

int run_cdf(const Options& opt) {
  const mb::SystemConfig config = load(opt);
  require_valid(config);
  const mb::TransportEngine engine(config.cocycle, config.profile, config.truncation);
  emit(opt.out, [&](std::ostream& os) { mb::write_cdf_csv(engine, fiber_x(opt, config), opt.grid, os); });
  return kPass;
}

int run_render(const Options& opt) {
  if (opt.what != "profiles" && opt.what != "measure" && opt.what != "orbit") {
    throw CLI::ValidationError("--what", "expected profiles, measure or orbit, got `" + opt.what + "`");
  }
  const mb::SystemConfig config = load(opt);
  require_valid(config);
  const mb::TransportEngine engine(config.cocycle, config.profile, config.truncation);
  if (opt.what == "profiles") {
    emit(opt.out, [&](std::ostream& os) { mb::render_profiles_svg(engine, os); });
  } else if (opt.what == "measure") {
    emit(opt.out, [&](std::ostream& os) { mb::render_measure_svg(engine, fiber_x(opt, config), os); });
  } else {
    std::vector<mb::OrbitRow> rows;
    if (!opt.input.empty()) {
      std::ifstream in(opt.input, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + opt.input);
      rows = mb::read_orbit_csv(in);
    } else {
      std::stringstream buf;
      mb::write_orbit_csv(engine, mb::parse_orbit_map(opt.map), seed_point(opt, config), opt.steps, buf);
      rows = mb::read_orbit_csv(buf);
    }
    emit(opt.out, [&](std::ostream& os) { mb::render_orbit_svg(rows, os); });
  }
  return kPass;
}

void add_common(CLI::App* cmd, Options& opt, const std::string& out_help) {
  cmd->add_option("--config", opt.config, "configuration file (default: $MINIMAL_BOTTLE_CONFIG, else built-in)");
  cmd->add_option("--out", opt.out, out_help);
}

void add_orbit_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--map", opt.map, "S, Shat or Stilde")->capture_default_str();
  cmd->add_option("--steps", opt.steps, "orbit length K")->capture_default_str();
  cmd->add_option("--seed-x", opt.seed_x, "seed x (number or p/q; default verify.orbit_seed)");
  cmd->add_option("--seed-y", opt.seed_y, "seed y (number or p/q; default verify.orbit_seed)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blown-up Parry skew product on the torus and its minimal Klein-bottle quotient"};
  app.name("minimal-bottle");
  app.require_subcommand(1);
  Options opt;

  auto* verify = app.add_subcommand("verify", "run the property battery; exit 1 if any check fails");
  add_common(verify, opt, "directory for verification_report.{txt,csv} (default output.dir)");

  auto* orbit = app.add_subcommand("orbit", "write an orbit as CSV (step,x,y,space)");
  add_common(orbit, opt, "output file (default stdout)");
  add_orbit_flags(orbit, opt);

  auto* render = app.add_subcommand("render", "write an SVG figure");
  add_common(render, opt, "output file (default stdout)");
  render->add_option("--what", opt.what, "profiles, measure or orbit")->required();
  render->add_option("--x", opt.x, "fiber for the measure view (default x1*)");
  render->add_option("--input", opt.input, "orbit CSV to plot instead of computing one");
  add_orbit_flags(render, opt);

  auto* cdf = app.add_subcommand("cdf", "write the fiber CDF on a grid as CSV (y,cdf,truncation_gap)");
  add_common(cdf, opt, "output file (default stdout)");
  cdf->add_option("--x", opt.x, "fiber (number or p/q; default x1*)");
  cdf->add_option("--grid", opt.grid, "grid size n; rows at y = k/n")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (verify->parsed()) return run_verify(opt);
    if (orbit->parsed()) return run_orbit(opt);
    if (render->parsed()) return run_render(opt);
    return run_cdf(opt);
  } catch (const CLI::Error& e) {
    std::cerr << "minimal-bottle: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "minimal-bottle: " << e.what() << "\n";
    return kUsage;
  }
}
