#pragma once

#include <cstddef>
#include <vector>

#include "minimal_bottle/blowup.hpp"
#include "minimal_bottle/skew.hpp"

namespace minimal_bottle {

/// Reference fiber CDF built from the raw specs in long double arithmetic,
/// sharing none of the fixed-point evaluation path. Each pushed-forward
/// component is integrated by a midpoint rule over `cells` cells of its
/// support; Dirac components are added explicitly.
class CdfOracle {
 public:
  CdfOracle(const CocycleSpec& cocycle, const ProfileSpec& profile, int truncation, std::size_t cells = 10000);

  double operator()(double x, double y) const;

 private:
  struct Bounds {
    bool dirac;
    long double lo;
    long double hi;
  };
  long double r(long double x) const;
  Bounds support(long double x) const;

  std::vector<long double> freq_;
  std::vector<long double> amp_;
  long double scale_;
  long double alpha_;
  long double x1_, y1_, lo_, hi_, y1_second_;
  int truncation_;
  std::size_t cells_;
};

}  // namespace minimal_bottle
