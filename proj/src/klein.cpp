#include "minimal_bottle/klein.hpp"

#include <algorithm>

namespace minimal_bottle {

double klein_dist(KleinPoint a, KleinPoint b) {
  return std::min(torus_dist(a.rep, b.rep), torus_dist(a.rep, involution(b.rep)));
}

KleinPoint s_tilde(const TransportEngine& engine, KleinPoint k) { return project(engine.s_hat(k.rep)); }

std::vector<KleinPoint> klein_orbit(const TransportEngine& engine, KleinPoint k0, std::size_t steps) {
  std::vector<KleinPoint> out;
  out.reserve(steps + 1);
  for_each_klein_orbit_point(engine, k0, steps, [&](std::size_t, KleinPoint k) { out.push_back(k); });
  return out;
}

}  // namespace minimal_bottle
