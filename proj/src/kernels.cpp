#include "minimal_bottle/kernels.hpp"

#include <cmath>
#include <limits>

namespace minimal_bottle {

std::vector<CdfValue> cdf_batch(const FiberMeasures& measures, std::span<const FiberQuery> queries, Execution exec) {
  return map_indices<CdfValue>(queries.size(), exec,
                               [&](std::size_t i) { return measures.cdf(queries[i].x, queries[i].y); });
}

std::vector<double> cdf_fiber(const FiberMeasures& measures, CirclePoint x, std::span<const Lift> ys, Execution exec) {
  const FiberCdf f = measures.fiber(x);
  return map_indices<double>(ys.size(), exec, [&](std::size_t i) { return f(ys[i]).value; });
}

std::vector<Lift> tau_batch(const TransportEngine& engine, std::span<const TorusPoint> points, Execution exec) {
  return map_indices<Lift>(points.size(), exec,
                           [&](std::size_t i) { return engine.tau(points[i].x, level_of(points[i].y)); });
}

std::vector<TorusPoint> t_map_batch(const TransportEngine& engine, std::span<const TorusPoint> points, Execution exec) {
  return map_indices<TorusPoint>(points.size(), exec, [&](std::size_t i) { return engine.t_map(points[i]); });
}

std::vector<TorusPoint> s_hat_batch(const TransportEngine& engine, std::span<const TorusPoint> points, Execution exec) {
  return map_indices<TorusPoint>(points.size(), exec, [&](std::size_t i) { return engine.s_hat(points[i]); });
}

double max_value(std::span<const double> values) {
  double m = values.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isnan(v)) return v;
    if (v > m) m = v;
  }
  return m;
}

}  // namespace minimal_bottle
