#pragma once

// Batch kernels over independent sample points. Every kernel has a serial
// reference path and an OpenMP path; both write result i from input i only,
// so the two agree bit for bit and reductions happen afterwards in index order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "minimal_bottle/blowup.hpp"
#include "minimal_bottle/transport.hpp"

namespace minimal_bottle {

enum class Execution { serial, parallel };

template <class F>
void for_each_index(std::size_t n, Execution exec, F&& f) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

template <class T, class F>
std::vector<T> map_indices(std::size_t n, Execution exec, F&& f) {
  std::vector<T> out(n);
  for_each_index(n, exec, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

struct FiberQuery {
  CirclePoint x;
  Lift y;
};

std::vector<CdfValue> cdf_batch(const FiberMeasures& measures, std::span<const FiberQuery> queries, Execution exec);

/// mu_x[0, y] for many y on one fiber.
std::vector<double> cdf_fiber(const FiberMeasures& measures, CirclePoint x, std::span<const Lift> ys, Execution exec);

/// tau_x(level) with the level read from each point's y-coordinate.
std::vector<Lift> tau_batch(const TransportEngine& engine, std::span<const TorusPoint> points, Execution exec);

std::vector<TorusPoint> t_map_batch(const TransportEngine& engine, std::span<const TorusPoint> points, Execution exec);
std::vector<TorusPoint> s_hat_batch(const TransportEngine& engine, std::span<const TorusPoint> points, Execution exec);

/// Largest element, or 0 for an empty span; NaN propagates.
double max_value(std::span<const double> values);

}  // namespace minimal_bottle
