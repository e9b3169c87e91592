#include "minimal_bottle/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "minimal_bottle/klein.hpp"

namespace minimal_bottle {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Maps the model box [0, width] x [0, 1] onto a square-ish plot area.
class Canvas {
 public:
  Canvas(std::ostream& out, double width, std::string title)
      : out_(out), width_(width), plot_w_(width >= 1.0 ? 560.0 : 280.0) {
    const double w = plot_w_ + 2 * kMargin;
    const double h = kPlotH + 2 * kMargin;
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(w) << "\" height=\"" << px(h)
         << "\" viewBox=\"0 0 " << px(w) << " " << px(h) << "\">\n";
    out_ << "<rect x=\"0\" y=\"0\" width=\"" << px(w) << "\" height=\"" << px(h) << "\" fill=\"white\"/>\n";
    out_ << "<text x=\"" << px(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         << "font-size=\"14\">" << title << "</text>\n";
    out_ << "<rect x=\"" << px(kMargin) << "\" y=\"" << px(kMargin) << "\" width=\"" << px(plot_w_) << "\" height=\""
         << px(kPlotH) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t = 0.0; t <= width_ + 1e-12; t += 0.25) {
      out_ << "<text x=\"" << px(sx(t)) << "\" y=\"" << px(kMargin + kPlotH + 16)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << t << "</text>\n";
    }
    for (double t = 0.0; t <= 1.0 + 1e-12; t += 0.25) {
      out_ << "<text x=\"" << px(kMargin - 6) << "\" y=\"" << px(sy(t) + 3)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << t << "</text>\n";
    }
  }
  ~Canvas() { out_ << "</svg>\n"; }

  double sx(double x) const { return kMargin + x / width_ * plot_w_; }
  double sy(double y) const { return kMargin + (1.0 - y) * kPlotH; }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke = 1.5) {
    if (pts.size() < 2) return;
    out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out_ << (i ? " " : "") << px(sx(pts[i].first)) << "," << px(sy(pts[i].second));
    out_ << "\"/>\n";
  }
  void dashed(double x0, double y0, double x1, double y1, const std::string& color) {
    out_ << "<line x1=\"" << px(sx(x0)) << "\" y1=\"" << px(sy(y0)) << "\" x2=\"" << px(sx(x1)) << "\" y2=\""
         << px(sy(y1)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"4,3\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill, const std::string& stroke) {
    out_ << "<circle cx=\"" << px(sx(x)) << "\" cy=\"" << px(sy(y)) << "\" r=\"" << r << "\" fill=\"" << fill
         << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void dot(double x, double y) {
    out_ << "<rect x=\"" << px(sx(x) - 0.5) << "\" y=\"" << px(sy(y) - 0.5) << "\" width=\"1\" height=\"1\"/>\n";
  }
  void label(double x, double y, const std::string& text, const std::string& color = "black") {
    out_ << "<text x=\"" << px(sx(x) + 6) << "\" y=\"" << px(sy(y) - 6) << "\" fill=\"" << color
         << "\" font-family=\"sans-serif\" font-size=\"11\">" << text << "</text>\n";
  }
  std::ostream& raw() { return out_; }

 private:
  static constexpr double kMargin = 40.0;
  static constexpr double kPlotH = 560.0;
  std::ostream& out_;
  double width_;
  double plot_w_;
};

// Splits a sampled lift curve where it wraps between 0 and 1.
std::vector<std::vector<std::pair<double, double>>> split_wraps(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::vector<std::pair<double, double>>> out(1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && std::abs(pts[i].second - pts[i - 1].second) > 0.5) out.emplace_back();
    out.back().push_back(pts[i]);
  }
  return out;
}

constexpr const char* kGreen = "#1a9850";
constexpr const char* kRed = "#d73027";

}  // namespace

OrbitMap parse_orbit_map(std::string_view name) {
  const std::string n = lower(name);
  if (n == "s") return OrbitMap::s;
  if (n == "shat") return OrbitMap::s_hat;
  if (n == "stilde") return OrbitMap::s_tilde;
  throw std::invalid_argument("unknown map `" + std::string(name) + "` (expected S, Shat or Stilde)");
}

std::string_view orbit_map_name(OrbitMap map) {
  switch (map) {
    case OrbitMap::s:
      return "S";
    case OrbitMap::s_hat:
      return "Shat";
    case OrbitMap::s_tilde:
      return "Stilde";
  }
  return "?";
}

CirclePoint parse_circle_point(std::string_view text) {
  const std::string t(text);
  const auto slash = t.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(t, &used);
      if (used == t.size() && std::isfinite(v)) return CirclePoint::from_double(v);
    } else {
      const long long p = std::stoll(t.substr(0, slash), &used);
      if (used == slash) {
        const std::string qs = t.substr(slash + 1);
        const unsigned long long q = std::stoull(qs, &used);
        if (used == qs.size() && q > 0 && qs.front() != '-') return CirclePoint::from_ratio(p, q);
      }
    }
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("cannot read `" + t + "` as a number or p/q");
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double turns(CirclePoint p) {
  // nearest double, kept below 1 so that the value stays a point of [0, 1)
  return std::min(std::ldexp(static_cast<double>(p.raw()), -64), 0x1.fffffffffffffp-1);
}

void write_orbit_csv(const TransportEngine& engine, OrbitMap map, TorusPoint z0, std::size_t steps, std::ostream& out) {
  out << "step,x,y,space\n";
  auto row = [&](std::size_t n, TorusPoint z, const char* space) {
    out << n << ',' << csv_number(turns(z.x)) << ',' << csv_number(turns(z.y)) << ',' << space << '\n';
  };
  if (map == OrbitMap::s_tilde) {
    for_each_klein_orbit_point(engine, project(z0), steps, [&](std::size_t n, KleinPoint k) { row(n, k.rep, "klein"); });
    return;
  }
  engine.for_each_orbit_point(map == OrbitMap::s ? MapId::parry : MapId::blown_up, z0, steps,
                              [&](std::size_t n, TorusPoint z) { row(n, z, "torus"); });
}

std::vector<OrbitRow> read_orbit_csv(std::istream& in) {
  std::vector<OrbitRow> rows;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("orbit CSV line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "step,x,y,space") fail("expected header step,x,y,space");
      continue;
    }
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string step, x, y, space;
    if (!std::getline(fields, step, ',') || !std::getline(fields, x, ',') || !std::getline(fields, y, ',') ||
        !std::getline(fields, space)) {
      fail("expected 4 fields");
    }
    if (space != "torus" && space != "klein") fail("space must be torus or klein");
    OrbitRow r;
    try {
      r.step = static_cast<std::size_t>(std::stoull(step));
      r.x = std::stod(x);
      r.y = std::stod(y);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    r.space = space;
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw std::runtime_error("orbit CSV is empty");
  return rows;
}

void write_cdf_csv(const TransportEngine& engine, CirclePoint x, std::size_t grid, std::ostream& out, Execution exec) {
  if (grid == 0) throw std::invalid_argument("cdf grid must be positive");
  std::vector<Lift> ys(grid + 1);
  for (std::size_t k = 0; k <= grid; ++k) ys[k] = Lift::from_raw((uint128{k} << 64) / grid);
  const auto values = cdf_fiber(engine.measures(), x, ys, exec);
  const double gap = engine.fiber(x)(Lift::zero()).truncation_gap;
  out << "y,cdf,truncation_gap\n";
  for (std::size_t k = 0; k <= grid; ++k) {
    out << csv_number(static_cast<double>(k) / static_cast<double>(grid)) << ',' << csv_number(values[k]) << ','
        << csv_number(gap) << '\n';
  }
}

void render_profiles_svg(const TransportEngine& engine, std::ostream& out) {
  const Profiles& p = engine.profiles();
  const ProfileSpec& spec = p.spec();
  Canvas c(out, 1.0, "P-invariant profiles: phi (green), psi (red)");
  constexpr std::size_t kSamples = 2000;
  std::vector<CirclePoint> xs;
  for (std::size_t i = 0; i <= kSamples; ++i) xs.push_back(CirclePoint::from_ratio(static_cast<std::int64_t>(i), kSamples));
  for (CirclePoint k : {spec.bump_lo, spec.x1_star, spec.bump_hi}) {
    xs.push_back(k);
    xs.push_back(k + CirclePoint::half());
  }
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> phi, psi;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // the last sample is x = 1, drawn with the values at 0
    const double x = (i + 1 == xs.size() && xs[i] == CirclePoint{}) ? 1.0 : xs[i].to_double();
    phi.emplace_back(x, p.phi(xs[i]));
    psi.emplace_back(x, p.psi(xs[i]));
  }
  for (const auto& part : split_wraps(phi)) c.polyline(part, kGreen, 2.0);
  for (const auto& part : split_wraps(psi)) c.polyline(part, kRed, 1.5);
  const std::pair<CirclePoint, double> stars[] = {{spec.x1_star, spec.y1_star}, {spec.x2_star(), spec.y2_star_lift()}};
  int j = 1;
  for (const auto& [x, y] : stars) {
    c.circle(x.to_double(), y, 4.0, "none", "black");
    c.label(x.to_double(), y, "z" + std::to_string(j++) + "* (" + csv_number(x.to_double()) + ", " + csv_number(y) + ")");
  }
}

void render_measure_svg(const TransportEngine& engine, CirclePoint x, std::ostream& out) {
  const FiberCdf f = engine.fiber(x);
  Canvas c(out, 1.0, "mu_x[0, y] at x = " + csv_number(x.to_double()));
  constexpr std::size_t kSamples = 2000;
  std::vector<Lift> ys;
  for (std::size_t k = 0; k <= kSamples; ++k) ys.push_back(Lift::from_raw((uint128{k} << 64) / kSamples));
  std::vector<Atom> atoms = f.atoms();
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
  for (const Atom& a : atoms) ys.push_back(a.position);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<std::pair<double, double>> seg;
  for (const Lift& y : ys) {
    const double mass = f.atom_mass_at(y);
    if (mass > 0.0) {
      const double left = f.left_limit(y);
      const double right = f(y).value;
      seg.emplace_back(y.to_double(), left);
      c.polyline(seg, "#2166ac");
      seg.clear();
      c.dashed(y.to_double(), left, y.to_double(), right, "#555555");
      c.circle(y.to_double(), left, 3.0, "white", "black");
      c.circle(y.to_double(), right, 3.0, "black", "black");
      c.label(y.to_double(), 0.5 * (left + right), "atom " + csv_number(mass));
      seg.emplace_back(y.to_double(), right);
    } else {
      seg.emplace_back(y.to_double(), f(y).value);
    }
  }
  c.polyline(seg, "#2166ac");
}

void render_orbit_svg(const std::vector<OrbitRow>& rows, std::ostream& out) {
  const bool klein = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const OrbitRow& r) { return r.space == "klein"; });
  Canvas c(out, klein ? 0.5 : 1.0,
           std::string(klein ? "Klein-bottle orbit (canonical domain)" : "torus orbit") + ", " +
               std::to_string(rows.size()) + " points");
  c.raw() << "<g fill=\"#08306b\">\n";
  for (const auto& r : rows) c.dot(r.x, r.y);
  c.raw() << "</g>\n";
}

BatteryOptions battery_options(const SystemConfig& config) {
  BatteryOptions opt = config.battery;
  opt.star_horizon = config.horizon;
  opt.star_margin = config.star_margin;
  return opt;
}

VerificationReport verify_config(const SystemConfig& config) {
  const std::vector<std::string> violations = config.violations();
  const TransportEngine engine(config.cocycle, config.profile, config.truncation);
  return run_battery(engine, battery_options(config), violations);
}

void write_verify_reports(const VerificationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  write("verification_report.txt", report.text());
  write("verification_report.csv", report.csv());
}

}  // namespace minimal_bottle
