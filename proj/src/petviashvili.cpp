#include "petviashvili.hpp"

#include <cmath>
#include <sstream>

#include "bcnls/diagnostics.hpp"

namespace bcnls::detail {

RadialField gaussian_guess(const RadialGridPtr& grid, int components, const PetviashviliOptions& opts) {
  const double s2 = 2.0 * opts.initial_width * opts.initial_width;
  return RadialField::sample(grid, components, [&](int j, double r) {
    const double delta = opts.perturbation.empty() ? 0.1 * j : opts.perturbation.at(static_cast<std::size_t>(j));
    return (1.0 + delta) * std::exp(-r * r / s2);
  });
}

EngineResult petviashvili(RadialField u, const ValidatedParams& params, double a, double b,
                          Normalization normalization, const PetviashviliOptions& opts,
                          const OperatorUpdate& update) {
  check_options(opts);
  const auto& grid = u.grid();
  const auto& w = grid.weights();
  const int m = u.components();
  const double p = params.exponent();
  const double gamma = opts.gamma > 0.0 ? opts.gamma : (2.0 * p - 1.0) / (2.0 * p - 2.0);
  const bool shared = normalization != Normalization::per_component;

  if (update) std::tie(a, b) = update(u);
  auto solver = std::make_unique<RadialBiharmonicSolver>(u.grid_ptr(), a, b);

  EngineResult out;
  out.damping = opts.damping;
  double best = std::numeric_limits<double>::infinity();
  int best_at = 0;
  std::vector<double> lap(static_cast<std::size_t>(grid.size()));
  RadialField v(u.grid_ptr(), m);
  std::vector<double> M(static_cast<std::size_t>(m), 1.0);

  for (int it = 1; it <= opts.max_iter; ++it) {
    const RadialField f = nonlinearity(u, params);
    double lin_total = 0.0, nl_total = 0.0, residual = 0.0;
    for (int j = 0; j < m; ++j) {
      solver->solve(f[j], v[j]);
      radial_laplacian(grid, u[j], lap);
      double lin = 0.0, nl = 0.0;
      for (std::size_t i = 0; i < lap.size(); ++i) {
        lin += w[i] * (a * lap[i] * lap[i] + b * u[j][i] * u[j][i]);
        nl += w[i] * f[j][i] * u[j][i];
        residual = std::max(residual, std::abs(u[j][i] - v[j][i]));
      }
      lin_total += lin;
      nl_total += nl;
      M[static_cast<std::size_t>(j)] = nl > 0.0 ? lin / nl : 1.0;
    }
    if (shared) {
      if (!(nl_total > 0.0)) {
        out.u = std::move(u);
        out.iterations = it;
        out.residual = residual;
        out.m_defect = std::numeric_limits<double>::infinity();
        return out;  // collapsed to zero
      }
      std::fill(M.begin(), M.end(), lin_total / nl_total);
    }
    double defect = 0.0;
    for (double mj : M) defect = std::max(defect, std::abs(mj - 1.0));

    out.iterations = it;
    out.residual = residual;
    out.m_defect = defect;
    if (!std::isfinite(residual) || !std::isfinite(defect)) break;
    if (residual <= opts.tol && defect <= opts.tol) {
      out.converged = true;
      break;
    }
    if (residual < 0.999 * best) {
      best = residual;
      best_at = it;
    } else if (it - best_at > 20 && residual > 10.0 * best && out.damping == 1.0) {
      out.damping = 0.5;  // oscillation: fall back once
      best_at = it;
    } else if (it - best_at > 2000) {
      break;  // stalled
    }

    const double d = out.damping;
    for (int j = 0; j < m; ++j) {
      const double scale = std::pow(M[static_cast<std::size_t>(j)], gamma);
      auto uj = u[j];
      auto vj = v[j];
      for (std::size_t i = 0; i < uj.size(); ++i) uj[i] = (1.0 - d) * uj[i] + d * scale * vj[i];
    }
    if (update) {
      const auto [na, nb] = update(u);
      if (na != a || nb != b) {
        a = na;
        b = nb;
        solver = std::make_unique<RadialBiharmonicSolver>(u.grid_ptr(), a, b);
      }
    }
  }
  out.u = std::move(u);
  return out;
}

}  // namespace bcnls::detail
