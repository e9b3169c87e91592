#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "minimal_bottle/commands.hpp"
#include "support.hpp"

using namespace minimal_bottle;
using testing_support::default_engine;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("map names and points") {
    CHECK(parse_orbit_map("S") == OrbitMap::s);
    CHECK(parse_orbit_map("shat") == OrbitMap::s_hat);
    CHECK(parse_orbit_map("Stilde") == OrbitMap::s_tilde);
    CHECK_THROWS_AS(parse_orbit_map("T"), std::invalid_argument);
    CHECK(parse_circle_point("1/8") == CirclePoint::from_ratio(1, 8));
    CHECK(parse_circle_point("-1/8") == CirclePoint::from_ratio(7, 8));
    CHECK(parse_circle_point("0.25") == CirclePoint::from_double(0.25));
    for (const char* bad : {"", "x", "1/", "1/0", "0.2.3", "1/-2", "nan"}) {
      CHECK_THROWS_AS(parse_circle_point(bad), std::invalid_argument);
    }
  }

  TEST_CASE("S orbit from the origin") {
    const auto& e = default_engine();
    std::ostringstream out;
    write_orbit_csv(e, OrbitMap::s, {}, 3, out);
    const auto rows = lines(out.str());
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "step,x,y,space");
    const CirclePoint a = e.base().alpha();
    const double expect_y[] = {0.0, 0.0, turns(e.base().r_shift(a)), turns(e.base().r_shift(a) + e.base().r_shift(a.times(2)))};
    for (int n = 0; n <= 3; ++n) {
      const auto f = split(rows[n + 1]);
      REQUIRE(f.size() == 4);
      CHECK(f[0] == std::to_string(n));
      CHECK(std::stod(f[1]) == turns(a.times(n)));
      CHECK(std::stod(f[2]) == expect_y[n]);
      CHECK(f[3] == "torus");
    }
    CHECK(std::stod(split(rows[3])[2]) == doctest::Approx(e.base().r(a) + 1.0));
  }

  TEST_CASE("orbit CSV round-trips and Klein rows stay canonical") {
    const auto& e = default_engine();
    std::stringstream buf;
    write_orbit_csv(e, OrbitMap::s_tilde, {CirclePoint::from_double(0.8), CirclePoint::from_double(0.2)}, 200, buf);
    const std::string text = buf.str();
    const auto rows = read_orbit_csv(buf);
    REQUIRE(rows.size() == 201);
    for (const auto& r : rows) {
      CHECK(r.space == "klein");
      CHECK(r.x < 0.5);
    }
    const auto csv = lines(text);
    for (std::size_t i = 1; i < csv.size(); ++i) {
      const auto f = split(csv[i]);
      CHECK(csv_number(std::stod(f[1])) == f[1]);
      CHECK(csv_number(std::stod(f[2])) == f[2]);
    }
    std::istringstream bad("step,x,y,space\n0,0.1,0.2,moon\n");
    CHECK_THROWS_AS(read_orbit_csv(bad), std::runtime_error);
  }

  TEST_CASE("CDF CSV") {
    const auto& e = default_engine();
    const CirclePoint x = CirclePoint::from_double(0.14);
    std::ostringstream a, b;
    write_cdf_csv(e, x, 64, a);
    write_cdf_csv(e, x + CirclePoint::half(), 64, b);
    const auto ra = lines(a.str()), rb = lines(b.str());
    REQUIRE(ra.size() == 66);
    CHECK(ra[0] == "y,cdf,truncation_gap");
    double prev = -1.0;
    for (std::size_t k = 0; k <= 64; ++k) {
      const auto fa = split(ra[k + 1]);
      const auto fb = split(rb[65 - k]);
      CHECK(std::stod(fa[0]) == k / 64.0);
      const double v = std::stod(fa[1]);
      CHECK(v >= prev);
      prev = v;
      CHECK(std::abs(v + std::stod(fb[1]) - 1.0) <= 1e-12);
    }
    CHECK(std::stod(split(ra[1])[1]) < 1e-12);
    CHECK(std::stod(split(ra[65])[1]) == doctest::Approx(1.0));
    std::ostringstream serial;
    write_cdf_csv(e, x, 64, serial, Execution::serial);
    CHECK(serial.str() == a.str());
  }

  TEST_CASE("SVG figures") {
    const auto& e = default_engine();
    std::ostringstream p;
    render_profiles_svg(e, p);
    CHECK(p.str().find("#1a9850") != std::string::npos);
    CHECK(p.str().find("#d73027") != std::string::npos);
    CHECK(p.str().find("z1* (0.125, 0.5)") != std::string::npos);
    CHECK(p.str().find("z2* (0.625, 0.5)") != std::string::npos);
    CHECK(p.str().rfind("</svg>\n") == p.str().size() - 7);

    std::ostringstream m;
    render_measure_svg(e, e.profiles().spec().x1_star, m);
    CHECK(m.str().find("atom 0.25") != std::string::npos);

    std::stringstream orbit;
    write_orbit_csv(e, OrbitMap::s_hat, {}, 0, orbit);
    std::ostringstream o;
    render_orbit_svg(read_orbit_csv(orbit), o);
    CHECK(count(o.str(), "width=\"1\" height=\"1\"") == 1);
  }
}
