#include "bcnls/gn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <array>
#include <random>
#include <sstream>

#include "petviashvili.hpp"

namespace bcnls {
namespace {

struct ElCoefficients {
  double a;  // (p - 1) N / 2
  double b;  // (N - p (N - 4)) / 2
};

ElCoefficients el_coefficients(const ValidatedParams& params) {
  return {(params.exponent() - 1.0) * params.dimension() / 2.0, params.pohozaev_denominator() / 2.0};
}

struct CandidateRun {
  RadialField u;
  bool converged = false;
  int iterations = 0;
  std::string note;
};

// a Delta^2 u + b u = F(u). Its continuum solutions are critical points of J with equal norms;
// on the grid the norms agree only to O(h^2) and the gauge step absorbs the difference.
CandidateRun euler_lagrange_run(RadialField init, const ValidatedParams& params, Normalization mode,
                                const GNOptions& opts) {
  const auto c = el_coefficients(params);
  auto r = detail::petviashvili(std::move(init), params, c.a, c.b, mode, opts.petviashvili);
  CandidateRun out{std::move(r.u), r.converged, r.iterations, ""};
  if (!r.converged) {
    std::ostringstream os;
    os << "residual " << r.residual << ", |M - 1| " << r.m_defect;
    out.note = os.str();
  }
  return out;
}

// Preconditioned descent on log J; the step with unit length coincides with the EL fixed-point map.
CandidateRun gradient_run(RadialField u, const ValidatedParams& params, const GNOptions& opts) {
  const auto c = el_coefficients(params);
  const int m = u.components();
  CandidateRun out;
  double tau = 0.5;
  auto moments = compute_moments(u, params);
  u *= 1.0 / std::sqrt(moments.kinetic);
  moments = compute_moments(u, params);
  double J = gn_quotient(moments);
  double J_prev = J;
  int stalled = 0;
  for (int it = 1; it <= opts.gradient_max_iter; ++it) {
    out.iterations = it;
    const double A = moments.kinetic, B = moments.l2, P = potential(moments);
    const auto f = nonlinearity(u, params);
    RadialBiharmonicSolver pre(u.grid_ptr(), c.a, c.b * A / B);
    RadialField dir(u.grid_ptr(), m);
    double dmax = 0.0;
    for (int j = 0; j < m; ++j) {
      // dir = (a Delta^2 + b A/B)^{-1} (A grad log J) = u - (a Delta^2 + b A/B)^{-1} (A/P) F(u).
      std::vector<double> rhs(f[j].begin(), f[j].end());
      for (double& v : rhs) v *= A / P;
      pre.solve(rhs, dir[j]);
      for (std::size_t i = 0; i < rhs.size(); ++i) {
        dir[j][i] = u[j][i] - dir[j][i];
        dmax = std::max(dmax, std::abs(dir[j][i]));
      }
    }
    if (dmax <= opts.gradient_tol * u.sup_norm()) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    for (; tau > 1e-8; tau *= 0.5) {
      RadialField trial = u - tau * dir;
      const auto tm = compute_moments(trial, params);
      if (!(potential(tm) > 0.0)) continue;
      const double tj = gn_quotient(tm);
      if (tj <= J) {
        u = std::move(trial);
        u *= 1.0 / std::sqrt(tm.kinetic);
        moments = compute_moments(u, params);
        J = tj;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // J no longer decreases in double precision; the iterate is as stationary as it can get.
      out.converged = dmax <= 1e-4 * u.sup_norm();
      if (!out.converged) out.note = "line search failed";
      break;
    }
    // On a fixed grid J keeps creeping down along the dilation direction at O(h^2) cost;
    // a per-step relative decrease below 1e-9 is treated as stationary.
    stalled = (J_prev - J) <= 1e-9 * J ? stalled + 1 : 0;
    J_prev = J;
    if (stalled >= 20 && dmax <= 1e-4 * u.sup_norm()) {
      out.converged = true;
      out.note = "J stationary";
      break;
    }
    tau = std::min(1.0, 2.0 * tau);
  }
  if (!out.converged && out.note.empty()) out.note = "iteration limit";
  out.u = std::move(u);
  return out;
}

RadialField single_component_guess(const RadialGridPtr& grid, int components, int active,
                                   const PetviashviliOptions& opts) {
  auto u = detail::gaussian_guess(grid, components, opts);
  for (int j = 0; j < components; ++j)
    if (j != active) std::fill(u[j].begin(), u[j].end(), 0.0);
  return u;
}

}  // namespace

GNResult minimize_J(const RadialGridPtr& grid, const ValidatedParams& params, const GNOptions& opts) {
  if (grid->dimension() != params.dimension()) throw GridMismatch("grid dimension differs from N");
  check_options(opts.petviashvili);
  const int m = params.components();

  struct Start {
    std::string label;
    RadialField init;
    Normalization mode;
  };
  std::vector<Start> starts;
  if (m > 1) {
    starts.push_back({"vector/shared", detail::gaussian_guess(grid, m, opts.petviashvili), Normalization::shared});
    starts.push_back(
        {"vector/per-component", detail::gaussian_guess(grid, m, opts.petviashvili), Normalization::per_component});
  }
  for (int j = 0; j < m; ++j) {
    starts.push_back({"component-" + std::to_string(j + 1), single_component_guess(grid, m, j, opts.petviashvili),
                      Normalization::shared});
  }

  GNResult result;
  std::optional<RadialField> best;
  double best_J = std::numeric_limits<double>::infinity();
  for (auto& s : starts) {
    CandidateRun run = opts.method == GNMethod::euler_lagrange
                           ? euler_lagrange_run(std::move(s.init), params, s.mode, opts)
                           : gradient_run(std::move(s.init), params, opts);
    GNCandidate cand{s.label, run.converged, std::numeric_limits<double>::quiet_NaN(), run.iterations, run.note};
    if (run.converged && run.u.all_finite()) {
      const auto mom = compute_moments(run.u, params);
      if (potential(mom) > 0.0) {
        cand.J = gn_quotient(mom);
        if (cand.J < best_J) {
          best_J = cand.J;
          best = std::move(run.u);
          result.selected = s.label;
        }
      }
    }
    result.candidates.push_back(cand);
  }
  if (!best) {
    int iters = 0;
    for (const auto& c : result.candidates) iters = std::max(iters, c.iterations);
    std::string msg = "no candidate for inf J converged";
    for (const auto& c : result.candidates) msg += "; " + c.label + ": " + c.note;
    throw ConvergenceError(msg, iters, std::numeric_limits<double>::quiet_NaN());
  }

  // Unit gauge: dilate the grid so the two norms agree, then scale the amplitude.
  const auto mom = compute_moments(*best, params);
  const double s = std::pow(mom.kinetic / mom.l2, 0.25);
  RadialField psi = best->on_grid(grid->dilated(s));
  psi *= 1.0 / std::sqrt(std::pow(s, params.dimension() - 4.0) * mom.kinetic);
  const auto gauged = compute_moments(psi, params);
  if (std::abs(gauged.kinetic - 1.0) > 1e-10 || std::abs(gauged.l2 - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "normalization failure: norms " << gauged.kinetic << ", " << gauged.l2;
    throw ConvergenceError(os.str(), 0, std::max(std::abs(gauged.kinetic - 1.0), std::abs(gauged.l2 - 1.0)));
  }

  const auto c = el_coefficients(params);
  result.alpha_min = gn_quotient(gauged);
  result.C_best = 1.0 / result.alpha_min;
  result.kinetic = gauged.kinetic;
  result.l2 = gauged.l2;
  result.potential = potential(gauged);
  result.el_residual = el_residual(psi, params, c.a, c.b, result.alpha_min).weighted_sup;
  result.alpha_from_el = (c.a * gauged.kinetic + c.b * gauged.l2) / gauged.interaction;
  if (!(result.el_residual <= opts.el_tol)) {
    std::ostringstream os;
    os << "Euler-Lagrange residual " << result.el_residual << " above " << opts.el_tol;
    throw ConvergenceError(os.str(), 0, result.el_residual);
  }
  int active = 0;
  for (int j = 0; j < m; ++j) active += psi.sup_norm(j) > 1e-8 * psi.sup_norm() ? 1 : 0;
  result.semi_trivial = active <= 1;
  result.minimizer = std::move(psi);
  return result;
}

double closed_form_C(int dimension, double exponent, const std::vector<double>& mu, double w_l2_norm) {
  if (mu.empty()) throw ValidationError(ValidationKind::components, "need at least one mu");
  const double n = dimension;
  const double p = exponent;
  const double d = n - p * (n - 4.0);
  const double mu_min = *std::min_element(mu.begin(), mu.end());
  return mu_min * 4.0 * p * std::pow(d, ((p - 1.0) * n - 4.0) / 4.0) /
         (std::pow(n * (p - 1.0), (p - 1.0) * n / 4.0) * std::pow(w_l2_norm, 2.0 * p - 2.0));
}

std::vector<double> ansatz_amplitudes(int dimension, double exponent, const std::vector<double>& mu, double alpha) {
  const double n = dimension;
  const double p = exponent;
  const double num = 4.0 * p - n * (p - 1.0);
  std::vector<double> A;
  for (double m : mu) A.push_back(std::pow(num / (2.0 * alpha * m), 1.0 / (2.0 * p - 2.0)));
  return A;
}

double ansatz_dilation(int dimension, double exponent) {
  const double n = dimension;
  const double p = exponent;
  return std::pow((4.0 * p - n * (p - 1.0)) / (n * (p - 1.0)), 0.25);
}

double amplitude_function(const std::vector<double>& A, const std::vector<double>& mu, double beta, double exponent) {
  const double p = exponent;
  double sum_sq = 0.0, diag = 0.0, cross = 0.0;
  for (std::size_t j = 0; j < A.size(); ++j) {
    sum_sq += A[j] * A[j];
    diag += mu[j] * std::pow(A[j], 2.0 * p);
    for (std::size_t k = 0; k < A.size(); ++k)
      if (k != j) cross += std::pow(A[j], p) * std::pow(A[k], p);
  }
  return std::pow(sum_sq, p) / (diag + beta * cross);
}

CrossValidation cross_validate(const GNResult& gn, const RadialField& w, const ReducedCoupling& rc,
                               const ValidatedParams& params, double tolerance, double regime_fraction) {
  if (w.components() != 1) throw GridMismatch("cross_validate needs the scalar profile w");
  CrossValidation cv;
  cv.tolerance = tolerance;
  const int n = params.dimension();
  const double p = params.exponent();
  const double w_norm = std::sqrt(radial_dot(w.grid(), w[0], w[0]));
  cv.variational_C = gn.C_best;
  cv.closed_form_C = closed_form_C(n, p, rc.mu, w_norm);

  // psi_j = A_j w(sigma x): the values of w on a grid dilated by 1 / sigma.
  const auto A = ansatz_amplitudes(n, p, rc.mu, gn.alpha_min);
  const auto dilated = w.grid().dilated(1.0 / ansatz_dilation(n, p));
  RadialField base = w.on_grid(dilated);
  const int m = static_cast<int>(rc.mu.size());
  cv.vector_ansatz_J = gn_quotient(vector_from_amplitudes(A, base), params);
  cv.semi_trivial_ansatz_J = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    std::vector<double> only(static_cast<std::size_t>(m), 0.0);
    only[static_cast<std::size_t>(j)] = A[static_cast<std::size_t>(j)];
    cv.semi_trivial_ansatz_J = std::min(cv.semi_trivial_ansatz_J, gn_quotient(vector_from_amplitudes(only, base), params));
  }
  cv.ansatz_C = 1.0 / std::min(cv.vector_ansatz_J, cv.semi_trivial_ansatz_J);

  cv.gap_variational_closed = std::abs(cv.variational_C - cv.closed_form_C) / cv.closed_form_C;
  cv.gap_variational_ansatz = std::abs(cv.variational_C - cv.ansatz_C) / cv.ansatz_C;
  cv.gap_closed_ansatz = std::abs(cv.closed_form_C - cv.ansatz_C) / cv.ansatz_C;
  cv.closed_over_variational = cv.closed_form_C / cv.variational_C;
  const double mu_min = *std::min_element(rc.mu.begin(), rc.mu.end());
  cv.in_regime = m == 1 || rc.beta <= regime_fraction * mu_min;
  cv.outcome = !cv.in_regime ? "OUT-OF-REGIME" : (cv.gap_variational_closed <= tolerance ? "PASS" : "FAIL");
  cv.ansatz_outcome = cv.gap_variational_ansatz <= tolerance ? "PASS" : "FAIL";
  return cv;
}

std::vector<RadialField> probe_corpus(const RadialGridPtr& grid, int components, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(0.5, 2.5), amp(0.2, 2.0), coef(-0.5, 0.5), shift(0.0, 2.0);
  std::vector<RadialField> probes;
  probes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int kind = i % 3;
    std::vector<std::array<double, 5>> prm(static_cast<std::size_t>(components));
    for (auto& q : prm) q = {amp(rng), width(rng), coef(rng), width(rng), shift(rng)};
    probes.push_back(RadialField::sample(grid, components, [&](int j, double r) {
      const auto& q = prm[static_cast<std::size_t>(j)];
      const double g = std::exp(-r * r / (2.0 * q[1] * q[1]));
      switch (kind) {
        case 0: return q[0] * g;
        case 1: return q[0] * (1.0 + q[2] * r * r / (q[1] * q[1])) * g;
        default: {
          const double d = r - q[4];
          return q[0] * g + 0.5 * q[0] * std::exp(-d * d / (2.0 * q[3] * q[3]));
        }
      }
    }));
  }
  return probes;
}

InequalityReport check_gn_inequality(double C, const std::vector<RadialField>& probes, const ValidatedParams& params,
                                     const RadialField* minimizer, double slack) {
  InequalityReport r;
  for (const auto& probe : probes) {
    const double ratio = 1.0 / (C * gn_quotient(probe, params));
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (ratio > 1.0 + slack) ++r.violations;
    ++r.probes;
  }
  if (minimizer) r.minimizer_ratio = 1.0 / (C * gn_quotient(*minimizer, params));
  return r;
}

}  // namespace bcnls
