#pragma once

// The Klein bottle as T^2 modulo the free involution P, with canonical
// representatives in the half-torus x in [0, 1/2).

#include <cstddef>
#include <vector>

#include "minimal_bottle/skew.hpp"
#include "minimal_bottle/transport.hpp"

namespace minimal_bottle {

struct KleinPoint {
  TorusPoint rep;  // rep.x in [0, 1/2)
  constexpr auto operator<=>(const KleinPoint&) const = default;
};

constexpr KleinPoint project(TorusPoint z) { return {z.x.in_first_half() ? z : involution(z)}; }

/// Quotient of the product metric: min over both representatives of b.
double klein_dist(KleinPoint a, KleinPoint b);

/// The induced map: S_tilde(pi z) = pi(S_hat z).
KleinPoint s_tilde(const TransportEngine& engine, KleinPoint k);

template <class Visitor>
void for_each_klein_orbit_point(const TransportEngine& engine, KleinPoint k0, std::size_t steps, Visitor&& visit) {
  KleinPoint k = k0;
  visit(std::size_t{0}, k);
  for (std::size_t n = 1; n <= steps; ++n) {
    k = s_tilde(engine, k);
    visit(n, k);
  }
}

std::vector<KleinPoint> klein_orbit(const TransportEngine& engine, KleinPoint k0, std::size_t steps);

}  // namespace minimal_bottle
