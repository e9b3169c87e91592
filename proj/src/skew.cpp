#include "minimal_bottle/skew.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace minimal_bottle {

namespace {

constexpr std::uint64_t kHalfRaw = std::uint64_t{1} << 63;
constexpr std::uint64_t kQuarterRaw = std::uint64_t{1} << 62;
constexpr uint128 kMaxDenominator = uint128{1} << 62;

}  // namespace

CocycleSpec CocycleSpec::liouville_default() {
  CocycleSpec spec;
  spec.partial_quotients = {1, 20, 4000, 2000000};
  const auto conv = convergents(spec.partial_quotients);
  const double c1 = 1.0;
  spec.harmonics.push_back({conv[0].q, c1});
  double weight = 0.25;
  for (std::size_t k = 1; k + 1 < conv.size(); ++k) {
    weight *= 0.25;
    spec.harmonics.push_back({conv[k].q, c1 * weight / static_cast<double>(conv[k].q)});
  }
  spec.scale = 0.2;
  return spec;
}

std::vector<std::string> CocycleSpec::violations() const {
  std::vector<std::string> out;
  if (partial_quotients.empty()) out.emplace_back("alpha.partial_quotients is empty");
  for (std::size_t k = 0; k < partial_quotients.size(); ++k) {
    if (partial_quotients[k] == 0) out.push_back("alpha.partial_quotients[" + std::to_string(k) + "] is zero");
  }
  if (harmonics.empty()) {
    out.emplace_back("cocycle.harmonics is empty");
    return out;
  }
  double amp_sum = 0.0;
  double tail = 0.0;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const auto& h = harmonics[k];
    if (h.frequency % 2 == 0) {
      out.push_back("cocycle.harmonics[" + std::to_string(k) + "] has even frequency " + std::to_string(h.frequency) +
                    " (breaks r(x+1/2) = -r(x))");
    }
    if (!(h.amplitude > 0.0)) out.push_back("cocycle.harmonics[" + std::to_string(k) + "] amplitude must be positive");
    amp_sum += std::abs(h.amplitude);
    if (k > 0) tail += std::abs(h.amplitude) * static_cast<double>(h.frequency);
  }
  if (harmonics[0].frequency != 1) out.emplace_back("cocycle.harmonics[0] must have frequency 1");
  if (!(harmonics[0].amplitude - tail > 0.0)) {
    out.emplace_back("positivity bound fails: c_1 - sum_{k>=2} c_k q_k <= 0");
  }
  if (!(scale > 0.0)) out.emplace_back("cocycle.scale must be positive");
  if (!(scale * amp_sum < 0.25)) out.emplace_back("amplitude bound fails: scale * sum c_k >= 1/4");
  return out;
}

std::vector<Convergent> convergents(std::span<const std::uint64_t> partial_quotients) {
  if (partial_quotients.empty()) throw std::invalid_argument("alpha recipe has no partial quotients");
  std::vector<Convergent> out;
  uint128 p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  uint128 p = 0, q = 1;            // p_0, q_0 for a_0 = 0
  for (std::size_t k = 0; k < partial_quotients.size(); ++k) {
    const uint128 a = partial_quotients[k];
    if (a == 0) throw std::invalid_argument("alpha recipe: partial quotient " + std::to_string(k + 1) + " is zero");
    const uint128 p_next = a * p + p_prev;
    const uint128 q_next = a * q + q_prev;
    if (q_next > kMaxDenominator || a > kMaxDenominator) {
      throw std::invalid_argument("alpha recipe: convergent denominator q_" + std::to_string(k + 1) +
                                  " exceeds 2^62; shorten or shrink the partial quotients");
    }
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    out.push_back({static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)});
  }
  return out;
}

double torus_dist(TorusPoint a, TorusPoint b) { return std::max(circle_dist(a.x, b.x), circle_dist(a.y, b.y)); }

double sin_turn(CirclePoint u) {
  std::uint64_t raw = u.raw();
  const bool negate = raw >= kHalfRaw;
  if (negate) raw -= kHalfRaw;
  if (raw > kQuarterRaw) raw = kHalfRaw - raw;
  const double s = std::sin(2.0 * std::numbers::pi * (static_cast<double>(raw) * kTwoPowMinus64));
  return negate ? -s : s;
}

SkewProduct::SkewProduct(CocycleSpec spec) : spec_(std::move(spec)) {
  convergents_ = minimal_bottle::convergents(spec_.partial_quotients);
  const Convergent& last = convergents_.back();
  alpha_ = CirclePoint::from_ratio(static_cast<std::int64_t>(last.p), last.q);
}

double SkewProduct::r(CirclePoint x) const {
  double acc = 0.0;
  for (const auto& h : spec_.harmonics) {
    acc += h.amplitude * sin_turn(x.times(static_cast<std::int64_t>(h.frequency)));
  }
  return spec_.scale * acc;
}

std::int64_t SkewProduct::r_raw(CirclePoint x) const {
  double v = r(x);
  if (!(std::abs(v) < 0.5)) v -= std::nearbyint(v);
  if (v >= 0.5) v = std::nextafter(0.5, 0.0);
  if (v <= -0.5) v = std::nextafter(-0.5, 0.0);
  return std::llround(v * kTwoPow64);
}

__int128 SkewProduct::raw_sum(CirclePoint x, std::int64_t n) const {
  __int128 acc = 0;
  if (n >= 0) {
    for (std::int64_t k = 0; k < n; ++k) acc += r_raw(rotate(x, k));
  } else {
    for (std::int64_t k = 1; k <= -n; ++k) acc -= r_raw(rotate(x, -k));
  }
  return acc;
}

double SkewProduct::rho(CirclePoint x, std::int64_t n) const {
  return static_cast<double>(raw_sum(x, n)) * kTwoPowMinus64;
}

CirclePoint SkewProduct::rho_shift(CirclePoint x, std::int64_t n) const {
  return CirclePoint::from_raw(static_cast<std::uint64_t>(raw_sum(x, n)));
}

std::vector<std::string> SkewProduct::violations(std::size_t grid) const {
  auto out = spec_.violations();
  double lo = 1.0, hi = -1.0;
  for (std::size_t i = 1; i < grid; ++i) {
    const double v = r(CirclePoint::from_ratio(static_cast<std::int64_t>(i), 2 * grid));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (grid > 1 && !(lo > 0.0)) {
    std::ostringstream msg;
    msg << "r is not positive on (0,1/2): min " << lo << " on a " << grid << "-point grid";
    out.push_back(msg.str());
  }
  if (grid > 1 && !(hi < 0.25)) {
    std::ostringstream msg;
    msg << "r exceeds 1/4 on (0,1/2): max " << hi << " on a " << grid << "-point grid";
    out.push_back(msg.str());
  }
  return out;
}

void BirkhoffCache::extend(std::size_t n) {
  while (sums_.size() <= n) {
    const auto k = static_cast<std::int64_t>(sums_.size() - 1);
    sums_.push_back(sums_.back() + base_->r_raw(base_->rotate(x_, k)));
  }
}

CirclePoint BirkhoffCache::shift(std::size_t n) {
  extend(n);
  return CirclePoint::from_raw(static_cast<std::uint64_t>(sums_[n]));
}

double BirkhoffCache::value(std::size_t n) {
  extend(n);
  return static_cast<double>(sums_[n]) * kTwoPowMinus64;
}

CoboundaryReport coboundary_diagnostic(const SkewProduct& base, std::size_t K, double factor) {
  const auto& harmonics = base.spec().harmonics;
  if (K > harmonics.size()) throw std::invalid_argument("coboundary_diagnostic: K exceeds the number of harmonics");
  CoboundaryReport report;
  report.factor = factor;
  double g = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const CirclePoint phase = base.alpha().times(static_cast<std::int64_t>(harmonics[k].frequency));
    // |e^{2 pi i t} - 1| = 2 |sin(pi t)|
    const double divisor = 2.0 * std::abs(sin_turn(CirclePoint::from_raw(phase.raw() / 2)));
    const double term = divisor > 0.0 ? harmonics[k].amplitude / divisor : INFINITY;
    report.terms.push_back(term);
    const double prev = g;
    g += term;
    report.partial_sums.push_back(g);
    if (k > 0) report.ratios.push_back(g / prev);
  }
  report.growing = K >= 2 && std::all_of(report.ratios.begin(), report.ratios.end(),
                                         [factor](double r) { return r >= factor; });
  return report;
}

}  // namespace minimal_bottle
