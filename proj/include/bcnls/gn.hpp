#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcnls/functionals.hpp"
#include "bcnls/groundstate.hpp"

namespace bcnls {

enum class GNMethod {
  /// Petviashvili on the Euler-Lagrange system of J.
  euler_lagrange,
  /// Preconditioned gradient descent on log J with amplitude renormalization.
  gradient_flow,
};

struct GNOptions {
  PetviashviliOptions petviashvili{};
  GNMethod method = GNMethod::euler_lagrange;
  int gradient_max_iter = 20000;
  double gradient_tol = 1e-10;
  /// Bound on GNResult::el_residual; it is O(h^2) on a fixed grid (about 9e-8 at R=20, n=4000).
  double el_tol = 1e-6;
};

struct GNCandidate {
  std::string label;  // "vector/shared", "vector/per-component", "component-1", ...
  bool converged = false;
  double J = 0.0;
  int iterations = 0;
  std::string note;
};

struct GNResult {
  double alpha_min = 0.0;  // inf J
  double C_best = 0.0;     // 1 / alpha_min
  /// Normalized so that sum ||Delta psi_j||^2 = sum ||psi_j||^2 = 1; lives on its own dilated grid.
  RadialField minimizer;
  /// max |psi - (a Delta^2 + b)^{-1} alpha F(psi)| with a = (p-1)N/2, b = (N - p(N-4))/2.
  double el_residual = 0.0;
  /// alpha from <(a Delta^2 + b) psi, psi> / <F(psi), psi>.
  double alpha_from_el = 0.0;
  double kinetic = 0.0;
  double l2 = 0.0;
  double potential = 0.0;
  std::vector<GNCandidate> candidates;
  std::string selected;
  /// The selected minimizer has a single active component.
  bool semi_trivial = false;
  std::optional<double> closed_form_C;
  std::optional<double> relative_gap;
};

/// inf J over radial fields: every Euler-Lagrange candidate (vector and semi-trivial) is solved
/// with the fixed operator a Delta^2 + b, moved to the unit gauge by grid dilation and amplitude,
/// and the lowest J is kept. Throws ConvergenceError when el_residual exceeds opts.el_tol.
GNResult minimize_J(const RadialGridPtr& grid, const ValidatedParams& params, const GNOptions& opts = {});

/// Closed form in ||w||, evaluated exactly as printed (min mu prefactor included).
double closed_form_C(int dimension, double exponent, const std::vector<double>& mu, double w_l2_norm);

/// Amplitudes A_j = ((4p - N(p-1)) / (2 alpha mu_j))^{1/(2p-2)} of the ansatz psi_j = A_j w(sigma x).
std::vector<double> ansatz_amplitudes(int dimension, double exponent, const std::vector<double>& mu, double alpha);
/// sigma = ((4p - N(p-1)) / (N(p-1)))^{1/4}.
double ansatz_dilation(int dimension, double exponent);

/// f_{m,p}(beta) = (sum A_j^2)^p / (sum mu_j A_j^{2p} + beta sum_{j != k} A_j^p A_k^p).
double amplitude_function(const std::vector<double>& A, const std::vector<double>& mu, double beta, double exponent);

struct CrossValidation {
  double variational_C = 0.0;
  double closed_form_C = 0.0;
  /// J at the full vector ansatz (all A_j nonzero) and at the best single-component ansatz.
  double vector_ansatz_J = 0.0;
  double semi_trivial_ansatz_J = 0.0;
  /// 1 / min(vector_ansatz_J, semi_trivial_ansatz_J).
  double ansatz_C = 0.0;
  double gap_variational_closed = 0.0;   // |C_var - C_closed| / C_closed
  double gap_variational_ansatz = 0.0;   // |C_var - C_ansatz| / C_ansatz
  double gap_closed_ansatz = 0.0;
  double closed_over_variational = 0.0;
  bool in_regime = false;  // beta <= regime_fraction * min mu
  double tolerance = 1e-2;
  /// "PASS", "FAIL" or "OUT-OF-REGIME" for the closed form against the variational constant.
  std::string outcome;
  /// "PASS" or "FAIL" for the ansatz against the variational constant.
  std::string ansatz_outcome;
};

CrossValidation cross_validate(const GNResult& gn, const RadialField& w, const ReducedCoupling& rc,
                               const ValidatedParams& params, double tolerance = 1e-2,
                               double regime_fraction = 0.05);

/// Seeded radial probes: Gaussians, Gaussian times polynomial, sums of two Gaussians.
std::vector<RadialField> probe_corpus(const RadialGridPtr& grid, int components, int count, std::uint64_t seed);

struct InequalityReport {
  int probes = 0;
  int violations = 0;  // P > C A^{(p-1)N/4} B^{(N-p(N-4))/4} (1 + slack)
  double max_ratio = 0.0;  // max over probes of P / (C A^.. B^..)
  double minimizer_ratio = 0.0;
};

InequalityReport check_gn_inequality(double C, const std::vector<RadialField>& probes, const ValidatedParams& params,
                                     const RadialField* minimizer = nullptr, double slack = 1e-6);

}  // namespace bcnls
