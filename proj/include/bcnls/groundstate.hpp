#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcnls/functionals.hpp"
#include "bcnls/grid.hpp"
#include "bcnls/params.hpp"

namespace bcnls {

/// How the Petviashvili stabilizing factor is formed for vector problems.
enum class Normalization {
  /// One quotient M for the whole field.
  shared,
  /// One quotient M_j per component.
  per_component,
  /// Shared first; per-component if that fails or lands on a semi-trivial profile.
  automatic,
};

const char* to_string(Normalization n);

struct PetviashviliOptions {
  int max_iter = 20000;
  /// Bound on the preconditioned residual max|u - (Delta^2 + 1)^{-1} F(u)| and on |M - 1|.
  double tol = 1e-10;
  /// Stabilizing exponent; 0 selects (2p - 1) / (2p - 2).
  double gamma = 0.0;
  double damping = 1.0;
  /// Initial Gaussian width sigma in exp(-r^2 / (2 sigma^2)).
  double initial_width = 1.0;
  /// Relative perturbation delta_j of component j in the initial guess; empty selects 0.1 j.
  std::vector<double> perturbation;
  Normalization normalization = Normalization::automatic;
};

/// Throws ValidationError(options) for tol <= 0, gamma outside (1, 3), damping outside (0, 1].
void check_options(const PetviashviliOptions& opts);

struct PohozaevDiagnostics {
  bool defined = false;
  double ratio_kinetic = 0.0;    // sum ||Delta psi_j||^2 / sum ||psi_j||^2
  double ratio_potential = 0.0;  // sum a_jk int |psi_j psi_k|^p / sum ||psi_j||^2
  double expected_kinetic = 0.0;    // N (p - 1) / (N - p (N - 4))
  double expected_potential = 0.0;  // 4p / (N - p (N - 4))
  double residual_kinetic = 0.0;    // ratio / expected - 1
  double residual_potential = 0.0;
};

/// Both Pohozaev ratios of a candidate solution. For one component with unit coupling these are
/// the scalar pair for w; with coupling they are the vector analogue obtained from K_{1,0} = K_{0,1} = 0.
PohozaevDiagnostics pohozaev_residuals(const RadialField& psi, const ValidatedParams& params);

struct PositivityReport {
  /// The profile is positive from the origin out to its first sign change.
  bool core_positive = false;
  /// Radius of the first node where the profile is <= 0; +inf if none.
  double first_sign_change = 0.0;
  /// min(profile) / max(profile).
  double min_relative = 0.0;
};

PositivityReport positivity(std::span<const double> profile, const RadialGrid& grid);

struct ConstraintSample {
  ScalingPair pair;
  double K = 0.0;
};

struct GroundStateResult {
  RadialField profile;
  double residual_sup = 0.0;      // preconditioned residual
  double raw_residual_sup = 0.0;  // max |Delta^2 psi + psi - F(psi)|
  int iterations = 0;
  double action_level = 0.0;
  std::vector<ConstraintSample> constraint_values;
  PohozaevDiagnostics pohozaev;
  std::vector<double> component_masses;
  std::vector<bool> active;  // component sup above 1e-8 of the largest
  bool semi_trivial = false;
  Normalization normalization_used = Normalization::shared;
  std::vector<PositivityReport> positivity;
  int restarts = 0;
};

/// Pairs sampled into GroundStateResult::constraint_values.
const std::vector<ScalingPair>& default_constraint_pairs();

/// w solving Delta^2 w + w = |w|^{2p-2} w on the grid.
GroundStateResult solve_scalar_w(const RadialGridPtr& grid, int dimension, double exponent,
                                 const PetviashviliOptions& opts = {}, ValidationOptions validation = {});

/// Full coupled system Delta^2 psi_j + psi_j = F_j(psi) from `init` (Gaussian guess when empty).
/// Landing on a semi-trivial profile is reported, not thrown.
GroundStateResult solve_vector_direct(const RadialGridPtr& grid, const ValidatedParams& params,
                                      const PetviashviliOptions& opts = {},
                                      const std::optional<RadialField>& init = std::nullopt);

/// Fills residuals, action, constraints, Pohozaev and positivity for a given field.
GroundStateResult certify(RadialField profile, const ValidatedParams& params);

struct AmplitudeSolution {
  std::vector<double> c;
  double residual = 0.0;  // max_j |mu_j c_j^{2p-2} + beta sum_{k != j} c_k^p c_j^{p-2} - 1|
  /// p = 2 with beta < min mu or beta > max mu (the regime with a guaranteed positive solution).
  bool hypothesis_satisfied = false;
};

/// Amplitudes c with psi_j = c_j w. Exact linear solve in s = c^2 at p = 2, damped Newton otherwise.
/// Throws DomainError when no positive solution exists or the system is singular.
AmplitudeSolution solve_amplitudes(const ReducedCoupling& rc, double exponent);

RadialField vector_from_amplitudes(const std::vector<double>& c, const RadialField& w);

struct DilationMax {
  double t_bar = 0.0;
  double g_max = 0.0;
  /// Golden-section maximizer of the sampled curve and its relative gap to g_max.
  double sampled_t = 0.0;
  double sampled_max = 0.0;
  double relative_gap = 0.0;
  /// N = 4: the supremum is the limit t -> 0+, so t_bar = 0 and g_max = sum ||Delta phi_j||^2 / 2.
  bool supremum_at_origin = false;
};

/// g(t) = S(phi(. / t)) = t^{N-4} sum ||Delta phi_j||^2 / 2 + t^N (sum ||phi_j||^2 / 2 - P).
std::vector<double> dilation_action_curve(const FieldMoments& m, const std::vector<double>& t_values);
/// Closed-form maximizer t_bar^4 = ((N - 4)/N) sum ||Delta phi||^2 / (2P - sum ||phi||^2) and
/// g(t_bar) = (2/N) t_bar^{N-4} sum ||Delta phi||^2. Throws DomainError when 2P <= sum ||phi||^2.
DilationMax dilation_action_max(const FieldMoments& m);

struct BetaSweepRow {
  double beta = 0.0;
  double semi_trivial_action = 0.0;
  int semi_trivial_component = 0;
  std::optional<double> vector_action;
  std::string vector_source;  // "direct", "amplitudes" or empty
  std::string classification;  // "vector", "semi-trivial" or "undetermined"
  std::string note;
};

struct BetaSweepReport {
  int dimension = 0;
  double exponent = 0.0;
  std::vector<double> mu;
  std::vector<BetaSweepRow> rows;
  /// First adjacent pair of betas whose classifications differ.
  std::optional<std::pair<double, double>> crossover;
};

/// Semi-trivial against vector action for each beta. Rows run in parallel (BCNLS_THREADS caps workers).
BetaSweepReport classify_beta(const RadialGridPtr& grid, int dimension, double exponent,
                              const std::vector<double>& mu, const std::vector<double>& betas,
                              const PetviashviliOptions& opts = {}, ValidationOptions validation = {});

/// Worker count from BCNLS_THREADS (default: hardware concurrency, at least 1).
int worker_count();

}  // namespace bcnls
