#include "minimal_bottle/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "minimal_bottle/transport.hpp"

namespace minimal_bottle {
namespace {

using nlohmann::json;

std::string where(const std::string& source, std::size_t line) {
  return line == 0 ? source : source + ":" + std::to_string(line);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a `#` comment that is not inside a JSON string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (in_string && s[i] == '\\') {
      ++i;
    } else if (s[i] == '"') {
      in_string = !in_string;
    } else if (!in_string && s[i] == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

struct Entry {
  std::size_t line;
  json value;
  std::string raw;
};

class Reader {
 public:
  Reader(std::string source, std::size_t line, std::string key) : source_(std::move(source)), line_(line), key_(std::move(key)) {}

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(source_, line_, key_ + ": " + what); }

  double number(const json& v) const {
    if (!v.is_number()) fail("expected a number, got " + v.dump());
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("expected a finite number");
    return d;
  }
  std::int64_t integer(const json& v) const {
    if (!v.is_number_integer()) fail("expected an integer, got " + v.dump());
    return v.get<std::int64_t>();
  }
  std::uint64_t positive(const json& v) const {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) fail("expected a positive integer, got " + v.dump());
    return v.get<std::uint64_t>();
  }
  std::size_t count(const json& v) const {
    if (!v.is_number_unsigned()) fail("expected a non-negative integer, got " + v.dump());
    return static_cast<std::size_t>(v.get<std::uint64_t>());
  }
  const json& array(const json& v, std::size_t size = 0) const {
    if (!v.is_array()) fail("expected a list, got " + v.dump());
    if (size != 0 && v.size() != size) fail("expected a list of " + std::to_string(size) + " values");
    return v;
  }
  /// A number, or "p/q" with integers p and q > 0.
  CirclePoint circle_point(const json& v) const {
    if (v.is_number()) return CirclePoint::from_double(number(v));
    if (!v.is_string()) fail("expected a number or \"p/q\"");
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    std::int64_t p = 0;
    std::uint64_t q = 0;
    const char* mid = s.data() + (slash == std::string::npos ? s.size() : slash);
    const auto r1 = std::from_chars(s.data(), mid, p);
    if (slash == std::string::npos || r1.ptr != mid || r1.ec != std::errc{}) fail("cannot read \"" + s + "\" as p/q");
    const auto r2 = std::from_chars(mid + 1, s.data() + s.size(), q);
    if (r2.ptr != s.data() + s.size() || r2.ec != std::errc{} || q == 0) fail("cannot read \"" + s + "\" as p/q");
    return CirclePoint::from_ratio(p, q);
  }

 private:
  std::string source_;
  std::size_t line_;
  std::string key_;
};

using Apply = void (*)(SystemConfig&, const Reader&, const json&);

const std::vector<std::pair<std::string, Apply>>& handlers() {
  static const std::vector<std::pair<std::string, Apply>> table = {
      {"alpha.partial_quotients",
       [](SystemConfig& c, const Reader& r, const json& v) {
         c.cocycle.partial_quotients.clear();
         for (const auto& a : r.array(v)) c.cocycle.partial_quotients.push_back(r.positive(a));
         if (c.cocycle.partial_quotients.empty()) r.fail("needs at least one partial quotient");
       }},
      {"cocycle.harmonics",
       [](SystemConfig& c, const Reader& r, const json& v) {
         c.cocycle.harmonics.clear();
         for (const auto& h : r.array(v)) {
           r.array(h, 2);
           c.cocycle.harmonics.push_back({r.positive(h[0]), r.number(h[1])});
         }
         if (c.cocycle.harmonics.empty()) r.fail("needs at least one harmonic");
       }},
      {"cocycle.scale", [](SystemConfig& c, const Reader& r, const json& v) { c.cocycle.scale = r.number(v); }},
      {"blowup.x1_star", [](SystemConfig& c, const Reader& r, const json& v) { c.profile.x1_star = r.circle_point(v); }},
      {"blowup.y1_star",
       [](SystemConfig& c, const Reader& r, const json& v) {
         const double y = r.number(v);
         if (!(y >= 0.0 && y < 1.0)) r.fail("must lie in [0, 1)");
         c.profile.y1_star = quantize_lift(y);
       }},
      {"blowup.bump",
       [](SystemConfig& c, const Reader& r, const json& v) {
         r.array(v, 2);
         c.profile.bump_lo = r.circle_point(v[0]);
         c.profile.bump_hi = r.circle_point(v[1]);
       }},
      {"blowup.truncation_N",
       [](SystemConfig& c, const Reader& r, const json& v) {
         const auto n = r.integer(v);
         if (n < 1 || n > 1000) r.fail("must lie in [1, 1000]");
         c.truncation = static_cast<int>(n);
       }},
      {"blowup.validate_horizon_M",
       [](SystemConfig& c, const Reader& r, const json& v) {
         c.horizon = r.integer(v);
         if (c.horizon < 1) r.fail("must be at least 1");
       }},
      {"blowup.star_margin", [](SystemConfig& c, const Reader& r, const json& v) { c.star_margin = r.number(v); }},
      // negative control: breaks the P-invariance of the profile graphs
      {"blowup.asymmetry", [](SystemConfig& c, const Reader& r, const json& v) { c.profile.asymmetry = r.number(v); }},
      {"verify.seed",
       [](SystemConfig& c, const Reader& r, const json& v) {
         if (!v.is_number_unsigned()) r.fail("expected a non-negative integer");
         c.battery.seed = v.get<std::uint64_t>();
       }},
      {"verify.samples", [](SystemConfig& c, const Reader& r, const json& v) { c.battery.samples = r.positive(v); }},
      {"verify.tol", [](SystemConfig& c, const Reader& r, const json& v) { c.battery.tol = r.number(v); }},
      {"verify.oracle_tol", [](SystemConfig& c, const Reader& r, const json& v) { c.battery.oracle_tol = r.number(v); }},
      {"verify.oracle_samples",
       [](SystemConfig& c, const Reader& r, const json& v) { c.battery.oracle_samples = r.positive(v); }},
      {"verify.oracle_cells",
       [](SystemConfig& c, const Reader& r, const json& v) { c.battery.oracle_cells = r.positive(v); }},
      {"verify.orbit_length",
       [](SystemConfig& c, const Reader& r, const json& v) { c.battery.orbit_length = r.count(v); }},
      {"verify.orbit_seed",
       [](SystemConfig& c, const Reader& r, const json& v) {
         r.array(v, 2);
         c.battery.orbit_seed = {r.circle_point(v[0]), r.circle_point(v[1])};
       }},
      {"verify.density_eps",
       [](SystemConfig& c, const Reader& r, const json& v) {
         c.battery.density_eps = r.number(v);
         if (!(c.battery.density_eps > 0.0 && c.battery.density_eps <= 0.5)) r.fail("must lie in (0, 0.5]");
       }},
      {"verify.coverage_min",
       [](SystemConfig& c, const Reader& r, const json& v) { c.battery.coverage_min = r.number(v); }},
      {"verify.theta_orders",
       [](SystemConfig& c, const Reader& r, const json& v) {
         c.battery.theta_orders.clear();
         for (const auto& n : r.array(v)) {
           const auto k = r.integer(n);
           if (k < 0) r.fail("orders must be non-negative");
           c.battery.theta_orders.push_back(static_cast<int>(k));
         }
       }},
      {"verify.theta_grid", [](SystemConfig& c, const Reader& r, const json& v) { c.battery.theta_grid = r.positive(v); }},
      {"verify.theta_modulus",
       [](SystemConfig& c, const Reader& r, const json& v) { c.battery.theta_modulus = r.number(v); }},
      {"verify.coboundary_factor",
       [](SystemConfig& c, const Reader& r, const json& v) { c.battery.coboundary_factor = r.number(v); }},
      {"output.dir",
       [](SystemConfig& c, const Reader& r, const json& v) {
         if (!v.is_string()) r.fail("expected a string path");
         c.output_dir = v.get<std::string>();
       }},
  };
  return table;
}

json parse_value(const std::string& key, const std::string& raw, const std::string& source, std::size_t line) {
  try {
    return json::parse(raw);
  } catch (const json::parse_error&) {
    // bare p/q for point-valued keys
    if (key == "blowup.x1_star" && raw.find('/') != std::string::npos && raw.find_first_of(" \t\"") == std::string::npos) {
      return json(raw);
    }
    throw ConfigError(source, line, key + ": cannot parse value `" + raw + "`");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Short ratios are written exactly, anything else to double precision.
std::string point_text(CirclePoint p) {
  for (std::uint64_t q = 1; q <= 1000; ++q) {
    const auto n = static_cast<std::int64_t>(std::llround(p.to_double() * static_cast<double>(q)));
    if (CirclePoint::from_ratio(n, q) == p) return "\"" + std::to_string(n) + "/" + std::to_string(q) + "\"";
  }
  return fmt(p.to_double());
}

}  // namespace

ConfigError::ConfigError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(where(source, line) + ": " + message), source_(std::move(source)), line_(line) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : handlers()) out.push_back(k);
    return out;
  }();
  return keys;
}

SystemConfig parse_config(std::string_view text, const std::string& source) {
  std::map<std::string, Apply> table;
  for (const auto& [k, f] : handlers()) table.emplace(k, f);

  SystemConfig config;
  std::set<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw_line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError(source, line_no, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected `key = value`");
    std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "missing key");
    if (!section.empty()) key = section + "." + key;
    if (value.empty()) throw ConfigError(source, line_no, key + ": missing value");
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(source, line_no, "unknown key `" + key + "`");
    if (!seen.insert(key).second) throw ConfigError(source, line_no, "duplicate key `" + key + "`");
    it->second(config, Reader(source, line_no, key), parse_value(key, value, source, line_no));
  }
  return config;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::vector<std::string> SystemConfig::violations() const {
  std::vector<std::string> out = profile.violations();
  std::vector<Convergent> conv;
  try {
    conv = convergents(cocycle.partial_quotients);
  } catch (const std::invalid_argument& e) {
    out.emplace_back(e.what());
    return out;
  }
  const SkewProduct base(cocycle);
  for (auto& v : base.violations()) out.push_back(std::move(v));
  if (truncation <= TransportEngine::kBisectionSteps) {
    out.push_back("blowup.truncation_N must exceed " + std::to_string(TransportEngine::kBisectionSteps));
  }
  if (out.empty()) {
    const StarPointReport rep = validate_star_points(base, profile, horizon, star_margin);
    if (!rep.ok) {
      out.push_back("star points: S-orbit of z" + std::to_string(rep.worst_star) + "* comes within " +
                    fmt(rep.min_margin) + " of an excluded height at m = " + std::to_string(rep.worst_m));
    }
  }
  return out;
}

std::string render_config(const SystemConfig& c) {
  std::ostringstream os;
  os << "alpha.partial_quotients = [";
  for (std::size_t i = 0; i < c.cocycle.partial_quotients.size(); ++i) {
    os << (i ? ", " : "") << c.cocycle.partial_quotients[i];
  }
  os << "]\ncocycle.harmonics = [";
  for (std::size_t i = 0; i < c.cocycle.harmonics.size(); ++i) {
    os << (i ? ", " : "") << "[" << c.cocycle.harmonics[i].frequency << ", " << fmt(c.cocycle.harmonics[i].amplitude)
       << "]";
  }
  os << "]\ncocycle.scale = " << fmt(c.cocycle.scale) << "\n";
  os << "blowup.x1_star = " << point_text(c.profile.x1_star) << "\n";
  os << "blowup.y1_star = " << fmt(c.profile.y1_star) << "\n";
  os << "blowup.bump = [" << point_text(c.profile.bump_lo) << ", " << point_text(c.profile.bump_hi) << "]\n";
  os << "blowup.truncation_N = " << c.truncation << "\n";
  os << "blowup.validate_horizon_M = " << c.horizon << "\n";
  os << "blowup.star_margin = " << fmt(c.star_margin) << "\n";
  if (c.profile.asymmetry != 0.0) os << "blowup.asymmetry = " << fmt(c.profile.asymmetry) << "\n";
  const BatteryOptions& b = c.battery;
  os << "verify.seed = " << b.seed << "\n";
  os << "verify.samples = " << b.samples << "\n";
  os << "verify.tol = " << fmt(b.tol) << "\n";
  os << "verify.oracle_tol = " << fmt(b.oracle_tol) << "\n";
  os << "verify.oracle_samples = " << b.oracle_samples << "\n";
  os << "verify.oracle_cells = " << b.oracle_cells << "\n";
  os << "verify.orbit_length = " << b.orbit_length << "\n";
  os << "verify.orbit_seed = [" << point_text(b.orbit_seed.x) << ", " << point_text(b.orbit_seed.y) << "]\n";
  os << "verify.density_eps = " << fmt(b.density_eps) << "\n";
  os << "verify.coverage_min = " << fmt(b.coverage_min) << "\n";
  os << "verify.theta_orders = [";
  for (std::size_t i = 0; i < b.theta_orders.size(); ++i) os << (i ? ", " : "") << b.theta_orders[i];
  os << "]\nverify.theta_grid = " << b.theta_grid << "\n";
  os << "verify.theta_modulus = " << fmt(b.theta_modulus) << "\n";
  os << "verify.coboundary_factor = " << fmt(b.coboundary_factor) << "\n";
  os << "output.dir = " << json(c.output_dir.string()).dump() << "\n";
  return os.str();
}

}  // namespace minimal_bottle
