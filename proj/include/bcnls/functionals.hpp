#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcnls/grid.hpp"
#include "bcnls/params.hpp"

namespace bcnls {

class SpectralTransform;

/// |x|^p for real p; integer exponents avoid std::pow.
double abs_pow(double x, double p);

/// Per-field integrals shared by every functional, so S, K, H and J reuse one pass over the data.
struct FieldMoments {
  int dimension = 0;
  double exponent = 0.0;
  std::vector<double> kinetic_per_component;  // ||Delta u_j||^2
  std::vector<double> mass_per_component;     // ||u_j||^2
  double kinetic = 0.0;                       // sum_j ||Delta u_j||^2
  double l2 = 0.0;                            // sum_j ||u_j||^2
  double interaction = 0.0;                   // sum_{j,k} a_jk int |u_j|^p |u_k|^p
};

FieldMoments compute_moments(const RadialField& u, const ValidatedParams& params);
/// Kinetic term by Parseval on the box, the rest by the lattice rule.
/// `fft` may supply a plan for u.components() blocks on u's grid.
FieldMoments compute_moments(const ComplexField& u, const ValidatedParams& params,
                             const SpectralTransform* fft = nullptr);

/// P = interaction / (2p).
double potential(const FieldMoments& m);
/// E = kinetic / 2 - P.
double energy(const FieldMoments& m);
/// S = E + l2 / 2.
double action(const FieldMoments& m);
/// K_{alpha,beta}, stored as K itself (half of the bracketed sum).
double constraint_K(const FieldMoments& m, ScalingPair pair);
/// Quadratic part of K, the scale used for "K >= -eps" comparisons.
double constraint_quadratic_part(const FieldMoments& m, ScalingPair pair);
/// H_{alpha,beta} = S - K / (2 alpha + N beta). Throws DomainError when 2 alpha + N beta = 0.
double functional_H(const FieldMoments& m, ScalingPair pair);
/// Weinstein-type quotient J. Throws DomainError when P <= 0.
double gn_quotient(const FieldMoments& m);

double potential(const RadialField& u, const ValidatedParams& params);
double energy(const RadialField& u, const ValidatedParams& params);
double action(const RadialField& u, const ValidatedParams& params);
double constraint_K(const RadialField& u, const ValidatedParams& params, ScalingPair pair);
double functional_H(const RadialField& u, const ValidatedParams& params, ScalingPair pair);
double gn_quotient(const RadialField& u, const ValidatedParams& params);

/// F_j(u) = sum_k a_jk |u_k|^p |u_j|^{p-2} u_j, with |u_j|^{p-2} regularized as max(|u_j|, 1e-30)^{p-2}.
RadialField nonlinearity(const RadialField& u, const ValidatedParams& params);

struct ElResidual {
  RadialField residual;     // a Delta^2 u + b u - s F(u)
  double raw_sup = 0.0;     // max |residual|
  double weighted_sup = 0.0;  // max |(a Delta^2 + b)^{-1} residual| = max |u - (a Delta^2 + b)^{-1} s F(u)|
};

/// Residual of a Delta^2 u + b u = s F(u); the defaults give the stationary system.
/// The raw residual carries roundoff amplified by ~16/h^4; weighted_sup is the usable measure.
ElResidual el_residual(const RadialField& u, const ValidatedParams& params, double a = 1.0, double b = 1.0,
                       double rhs_scale = 1.0);

struct FunctionalReport {
  std::vector<double> mass;
  double kinetic = 0.0;
  double l2 = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double action = 0.0;
  std::optional<ScalingPair> pair;
  std::optional<double> K;
  std::optional<double> H;
  std::optional<double> J;  // absent when P <= 0
};

FunctionalReport functional_report(const FieldMoments& m, std::optional<ScalingPair> pair = std::nullopt);
/// Column names mass_1..mass_m, kinetic, l2, potential, energy, action, K_alpha_beta, H_alpha_beta, J.
std::vector<std::string> functional_report_columns(int components);
/// Values in column order; missing entries are NaN.
std::vector<double> functional_report_values(const FunctionalReport& r);

// ---------------------------------------------------------------------------------------------
// Scaling flow u -> e^{alpha lambda} u(e^{-beta lambda} x)

enum class ScalingMode {
  /// Same grid, values by cubic interpolation (quadrature-level error).
  interpolate,
  /// Same values on a grid dilated by e^{beta lambda}: exact for the discrete functionals.
  transport,
};

RadialField scaling_flow(const RadialField& u, ScalingPair pair, double lambda,
                         ScalingMode mode = ScalingMode::interpolate, RescaleReport* report = nullptr);

struct LieDerivativeSample {
  double lambda = 0.0;
  double finite_difference = 0.0;
  double error = 0.0;  // |finite_difference - K|
};

struct LieDerivativeReport {
  double K = 0.0;
  double action = 0.0;
  std::vector<LieDerivativeSample> samples;
  /// Least-squares slope of log(error) against log(lambda); NaN if any error is zero.
  double observed_order = 0.0;
};

/// Central differences (S(u^lambda) - S(u^-lambda)) / (2 lambda) against constraint_K.
LieDerivativeReport lie_derivative_check(const RadialField& u, const ValidatedParams& params, ScalingPair pair,
                                         const std::vector<double>& lambdas = {1e-2, 5e-3, 2.5e-3},
                                         ScalingMode mode = ScalingMode::transport);

}  // namespace bcnls
