// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "minimal_bottle/commands.hpp"
#include "minimal_bottle/verify.hpp"

using namespace minimal_bottle;
namespace fs = std::filesystem;

namespace {

struct Line {
  std::string text;
  bool pass = true;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string describe(const CheckResult& c) {
  const char* op = c.bound == Bound::at_most ? "<=" : c.bound == Bound::below ? "<" : ">=";
  return c.name + " " + num(c.residual) + " " + op + " " + num(c.tolerance) + (c.pass ? "" : " [FAIL]");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Criteria {
 public:
  void report(int id, const std::string& title, const std::vector<CheckResult>& checks, std::string extra = {},
              bool extra_ok = true) {
    bool ok = extra_ok;
    std::string body;
    for (const auto& c : checks) {
      ok = ok && c.pass;
      body += (body.empty() ? "" : "; ") + describe(c);
    }
    if (!extra.empty()) body += (body.empty() ? "" : "; ") + extra;
    std::printf("criterion %d %-24s %s  %s\n", id, title.c_str(), ok ? "PASS" : "FAIL", body.c_str());
    std::fflush(stdout);
    all_ = all_ && ok;
  }
  bool all() const { return all_; }

 private:
  bool all_ = true;
};

int run(const std::string& args) {
  const int status = std::system(("'" MINIMAL_BOTTLE_EXE "' " + args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  Criteria crit;
  const TransportEngine engine(CocycleSpec::liouville_default(), ProfileSpec{}, 60);
  BatteryOptions opt;  // 10^4 samples, tol 1e-9, oracle 100 samples at 1e-3, K = 10^5, eps = 0.05

  {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckResult c = check_symmetry(engine, opt);
    const double t = seconds_since(t0);
    crit.report(1, "symmetry", {c}, "runtime " + num(t) + " s <= 60 s", t <= 60.0);
  }
  crit.report(2, "quantile round trip", {check_quantile_roundtrip(engine, opt)});
  crit.report(3, "conjugacies", {check_semiconjugacy(engine, opt), check_commutation(engine, opt),
                                 check_klein_well_defined(engine, opt)});
  crit.report(4, "non-invertibility", {check_collapse_atom(engine, opt), check_collapse_coincidence(engine, opt),
                                       check_collapse_separation(engine, opt)});
  crit.report(5, "oracle equivalence", {check_cdf_oracle(engine, opt), check_truncation_bracket(engine, opt)});
  crit.report(6, "endpoints and profiles", {check_tau_endpoints(engine, opt), check_profile_invariance(engine, opt),
                                            check_r_antisymmetry(engine, opt), check_r_range(engine, opt)});
  {
    const auto t0 = std::chrono::steady_clock::now();
    const DensityReport hat = density_report(engine, MapId::blown_up, opt.orbit_seed, opt.orbit_length, opt.density_eps);
    const DensityReport tilde = density_report(engine, MapId::klein, opt.orbit_seed, opt.orbit_length, opt.density_eps);
    const double t = seconds_since(t0);
    crit.report(7, "minimality proxy", {check_density(hat, opt), check_density(tilde, opt)},
                "runtime " + num(t) + " s <= 300 s", t <= 300.0);
  }
  {
    // The controls pass when the targeted checks fail.
    CocycleSpec even = CocycleSpec::liouville_default();
    even.harmonics.push_back({2, 0.05});
    const TransportEngine bad_r(even, ProfileSpec{}, 60);
    const CheckResult sym_r = check_symmetry(bad_r, opt);
    const CheckResult semi = check_semiconjugacy(bad_r, opt);
    const CheckResult comm = check_commutation(bad_r, opt);
    const CheckResult klein = check_klein_well_defined(bad_r, opt);
    ProfileSpec lopsided;
    lopsided.asymmetry = 0.01;
    const TransportEngine bad_p(CocycleSpec::liouville_default(), lopsided, 60);
    const CheckResult sym_p = check_symmetry(bad_p, opt);
    const bool check3_fails = !(semi.pass && comm.pass && klein.pass);
    const bool ok = !sym_r.pass && check3_fails && !sym_p.pass;
    crit.report(8, "negative controls", {},
                "even harmonic: " + describe(sym_r) + ", " + describe(semi) + ", " + describe(comm) + ", " +
                    describe(klein) + "; broken profile: " + describe(sym_p),
                ok);
  }
  {
    const fs::path dir = fs::temp_directory_path() / "minimal_bottle_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 2; ++i) {
      const fs::path out = dir / ("verify" + std::to_string(i));
      const int code = run("verify --out '" + out.string() + "' > '" + (dir / ("stdout" + std::to_string(i))).string() + "'");
      ok = ok && code == 0;
      for (const char* map : {"Shat", "Stilde", "S"}) {
        const fs::path csv = dir / (std::string("orbit_") + map + std::to_string(i) + ".csv");
        ok = ok && run(std::string("orbit --map ") + map + " --steps 20000 --out '" + csv.string() + "'") == 0;
      }
    }
    auto same = [&](const std::string& a, const std::string& b) {
      const std::string x = slurp(dir / a), y = slurp(dir / b);
      const bool eq = !x.empty() && x == y;
      detail += (detail.empty() ? "" : ", ") + a + (eq ? " identical" : " DIFFERS");
      ok = ok && eq;
    };
    same("verify0/verification_report.txt", "verify1/verification_report.txt");
    same("verify0/verification_report.csv", "verify1/verification_report.csv");
    same("stdout0", "stdout1");
    for (const char* map : {"Shat", "Stilde", "S"}) same(std::string("orbit_") + map + "0.csv", std::string("orbit_") + map + "1.csv");
    crit.report(9, "determinism", {}, detail, ok);
    fs::remove_all(dir);
  }

  std::printf("acceptance %s\n", crit.all() ? "PASS" : "FAIL");
  return crit.all() ? 0 : 1;
}
