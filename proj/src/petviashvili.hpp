#pragma once

#include <functional>
#include <utility>

#include "bcnls/groundstate.hpp"

namespace bcnls::detail {

struct EngineResult {
  RadialField u;
  int iterations = 0;
  double residual = 0.0;
  double m_defect = 0.0;  // max |M - 1|
  bool converged = false;
  double damping = 1.0;
};

/// (a, b) of the linear operator a Delta^2 + b evaluated at the current iterate.
using OperatorUpdate = std::function<std::pair<double, double>(const RadialField&)>;

/// u <- M^gamma (a Delta^2 + b)^{-1} F(u) with M = <(a Delta^2 + b) u, u> / <F(u), u>, shared or
/// per component. `update`, when set, recomputes (a, b) every iteration.
EngineResult petviashvili(RadialField u, const ValidatedParams& params, double a, double b,
                          Normalization normalization, const PetviashviliOptions& opts,
                          const OperatorUpdate& update = {});

RadialField gaussian_guess(const RadialGridPtr& grid, int components, const PetviashviliOptions& opts);

}  // namespace bcnls::detail
