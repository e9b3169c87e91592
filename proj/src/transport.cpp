#include "minimal_bottle/transport.hpp"

#include <algorithm>
#include <stdexcept>


namespace minimal_bottle {

TransportEngine::TransportEngine(CocycleSpec cocycle, ProfileSpec profile, int truncation)
    : base_(std::move(cocycle)), profiles_(std::move(profile)), measures_(base_, profiles_, truncation) {
  if (truncation <= kBisectionSteps) {
    throw std::invalid_argument("truncation depth must exceed " + std::to_string(kBisectionSteps) +
                                " so that the bisection tolerance dominates the truncation gap");
  }
}

Lift TransportEngine::tau(const FiberCdf& f, double level) const {
  if (!(level > 0.0)) return Lift::zero();
  if (level >= 1.0) return Lift::one();
  uint128 lo = 0;
  uint128 hi = kFullTurn;
  // f(lo) < level <= f(hi)
  for (int i = 0; i < kBisectionSteps; ++i) {
    const uint128 mid = lo + (hi - lo) / 2;
    if (f(Lift::from_raw(mid)).value >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // An atom in the final bracket with F(a) >= level bounds tau from above, so
  // tau lies in (lo, a]; returning a keeps level-in-jump inputs on the atom.
  for (const Atom& a : f.atoms()) {
    if (a.position.raw() > lo && a.position.raw() <= hi && f(a.position).value >= level) {
      return a.position;
    }
  }
  return Lift::from_raw(hi);
}

TorusPoint TransportEngine::t_map(TorusPoint z) const { return {z.x, tau(z.x, level_of(z.y)).point()}; }

TorusPoint TransportEngine::s_hat(TorusPoint z) const {
  const FiberCdf here = fiber(z.x);
  const double level = level_of(z.y);
  const Lift w = tau(here, level);
  const CirclePoint next_x = base_.rotate(z.x);
  const Lift image = Lift::from_point(w.point() + base_.r_shift(z.x));
  const FiberCdf there = fiber(next_x);
  double v = there(image).value;
  if (here.atom_mass_at(w) > 0.0) {
    const double upper = here(w).value;
    const double lower = here.left_limit(w);
    const double theta = std::clamp((level - lower) / (upper - lower), 0.0, 1.0);
    const double image_lower = there.left_limit(image);
    v = image_lower + theta * (v - image_lower);
  }
  return {next_x, CirclePoint::from_double(v)};
}

TorusPoint TransportEngine::s_hat_direct(TorusPoint z) const {
  const Lift w = tau(z.x, level_of(z.y));
  const CirclePoint next_x = base_.rotate(z.x);
  const Lift image = Lift::from_point(w.point() + base_.r_shift(z.x));
  return {next_x, CirclePoint::from_double(measures_.cdf(next_x, image).value)};
}

bool TransportEngine::in_backward_orbit(CirclePoint x, std::int64_t horizon) const {
  const CirclePoint x1 = profiles_.spec().x1_star;
  const CirclePoint x2 = profiles_.spec().x2_star();
  for (std::int64_t m = 0; m <= horizon; ++m) {
    const CirclePoint y = base_.rotate(x, m);
    if (y == x1 || y == x2) return true;
  }
  return false;
}

bool TransportEngine::in_orbit(CirclePoint x, std::int64_t horizon) const {
  const CirclePoint x1 = profiles_.spec().x1_star;
  const CirclePoint x2 = profiles_.spec().x2_star();
  for (std::int64_t m = -horizon; m <= horizon; ++m) {
    const CirclePoint y = base_.rotate(x, m);
    if (y == x1 || y == x2) return true;
  }
  return false;
}

TorusPoint TransportEngine::apply(MapId map, TorusPoint z) const {
  switch (map) {
    case MapId::parry:
      return base_.step(z);
    case MapId::blown_up:
      return s_hat(z);
    case MapId::klein:
      break;
  }
  throw std::invalid_argument("TransportEngine::apply: the Klein map acts on KleinPoint; see klein.hpp");
}

std::vector<TorusPoint> TransportEngine::orbit(MapId map, TorusPoint z0, std::size_t steps) const {
  std::vector<TorusPoint> out;
  out.reserve(steps + 1);
  for_each_orbit_point(map, z0, steps, [&](std::size_t, TorusPoint z) { out.push_back(z); });
  return out;
}

}  // namespace minimal_bottle
