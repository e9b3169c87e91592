#pragma once

// The quantile map tau_x, the fiber-monotone map T(x, y) = (x, tau_x(y)), and
// the blown-up map S_hat with T o S_hat = S o T.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "minimal_bottle/blowup.hpp"
#include "minimal_bottle/skew.hpp"

namespace minimal_bottle {

enum class MapId { parry, blown_up, klein };

class TransportEngine {
 public:
  static constexpr int kBisectionSteps = 52;

  /// Throws std::invalid_argument unless truncation > kBisectionSteps, so that
  /// the bisection bracket 2^-52 dominates the truncation gap.
  TransportEngine(CocycleSpec cocycle, ProfileSpec profile, int truncation = 60);

  TransportEngine(const TransportEngine&) = delete;
  TransportEngine& operator=(const TransportEngine&) = delete;

  const SkewProduct& base() const { return base_; }
  const Profiles& profiles() const { return profiles_; }
  const FiberMeasures& measures() const { return measures_; }
  int truncation() const { return measures_.truncation(); }
  static double bisect_tol() { return 0x1p-52; }

  FiberCdf fiber(CirclePoint x) const { return measures_.fiber(x); }

  /// Lower generalized inverse min{y' : mu_x[0, y'] >= level}. Bisection runs
  /// a fixed number of steps; an atom inside the final bracket is returned
  /// exactly.
  Lift tau(CirclePoint x, double level) const { return tau(fiber(x), level); }
  Lift tau(const FiberCdf& f, double level) const;

  TorusPoint t_map(TorusPoint z) const;

  /// The continuous map S_hat. Off the atom fibers this is
  /// (x + alpha, mu_{x+alpha}[0, sigma_x(tau_x(y))]); on a fiber carrying an
  /// atom at tau_x(y), the level's position inside the atom's jump is carried
  /// over to the image jump, which is the limit of S_hat from nearby fibers.
  TorusPoint s_hat(TorusPoint z) const;
  /// The closed formula evaluated literally, atoms included.
  TorusPoint s_hat_direct(TorusPoint z) const;

  /// x in O^- = backward orbits of x_1*, x_2*, searched to depth `horizon`.
  bool in_backward_orbit(CirclePoint x, std::int64_t horizon) const;
  /// x in O = full orbits of x_1*, x_2*, searched to |m| <= horizon.
  bool in_orbit(CirclePoint x, std::int64_t horizon) const;

  /// S or S_hat; MapId::klein is rejected (see klein.hpp).
  TorusPoint apply(MapId map, TorusPoint z) const;

  /// Visits z0, f(z0), ..., f^K(z0) for f in {S, S_hat}; x-coordinates are
  /// x0 + n alpha.
  template <class Visitor>
  void for_each_orbit_point(MapId map, TorusPoint z0, std::size_t steps, Visitor&& visit) const {
    TorusPoint z = z0;
    visit(std::size_t{0}, z);
    for (std::size_t n = 1; n <= steps; ++n) {
      z = apply(map, z);
      z.x = base_.rotate(z0.x, static_cast<std::int64_t>(n));
      visit(n, z);
    }
  }

  std::vector<TorusPoint> orbit(MapId map, TorusPoint z0, std::size_t steps) const;

 private:
  SkewProduct base_;
  Profiles profiles_;
  FiberMeasures measures_;
};

/// CDF level encoded by a torus height y in [0,1).
inline double level_of(CirclePoint y) { return y.to_double(); }

}  // namespace minimal_bottle
