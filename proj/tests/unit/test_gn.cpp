#include <gtest/gtest.h>

#include <cmath>

#include "bcnls/gn.hpp"

using namespace bcnls;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

RadialGridPtr grid52() {
  static const auto g = RadialGrid::make(5, 20.0, 4000);
  return g;
}

const GNResult& scalar52() {
  static const GNResult r = minimize_J(grid52(), make_params(5, 2.0, {{1.0}, 0.0}));
  return r;
}

const RadialField& w52() {
  static const RadialField w = solve_scalar_w(grid52(), 5, 2.0).profile;
  return w;
}

}  // namespace

TEST(MinimizeJ, UnitGaugeAndConstantIsPotential) {
  const auto& r = scalar52();
  EXPECT_NEAR(r.kinetic, 1.0, 1e-10);
  EXPECT_NEAR(r.l2, 1.0, 1e-10);
  EXPECT_LT(rel(r.C_best, r.potential), 1e-10);
  EXPECT_LT(rel(r.C_best * r.alpha_min, 1.0), 1e-15);
  EXPECT_LT(rel(r.alpha_from_el, r.alpha_min), 1e-8);
}

TEST(MinimizeJ, BelowGaussianProbe) {
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  auto gauss = RadialField::sample(grid52(), 1, [](int, double r) { return std::exp(-0.5 * r * r); });
  EXPECT_LE(scalar52().alpha_min, gn_quotient(gauss, params));
}

TEST(MinimizeJ, EulerLagrangeResidualIsSecondOrder) {
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  GNOptions opts;
  opts.el_tol = 1e-8;
  const auto fine = minimize_J(RadialGrid::make(5, 20.0, 16000), params, opts);
  EXPECT_LE(fine.el_residual, 1e-8);
  EXPECT_GT(scalar52().el_residual / fine.el_residual, 10.0);
  EXPECT_LT(rel(fine.alpha_min, scalar52().alpha_min), 1e-4);
}

TEST(MinimizeJ, ResidualAboveToleranceThrows) {
  GNOptions opts;
  opts.el_tol = 1e-12;
  EXPECT_THROW(minimize_J(grid52(), make_params(5, 2.0, {{1.0}, 0.0}), opts), ConvergenceError);
}

TEST(MinimizeJ, GradientFlowCrossCheck) {
  GNOptions opts;
  opts.method = GNMethod::gradient_flow;
  const auto gf = minimize_J(grid52(), make_params(5, 2.0, {{1.0}, 0.0}), opts);
  EXPECT_LT(rel(gf.alpha_min, scalar52().alpha_min), 1e-4);
}

TEST(MinimizeJ, DecoupledPairMatchesScalar) {
  auto params = make_params(5, 2.0, {{1.0, 1.0}, 0.0}, {.allow_decoupled = true});
  const auto r = minimize_J(grid52(), params);
  EXPECT_TRUE(r.semi_trivial);
  EXPECT_LT(rel(r.alpha_min, scalar52().alpha_min), 1e-9);
}

TEST(MinimizeJ, WeakCouplingMinimizerIsSemiTrivial) {
  // Below beta = 1 (mu = (1, 1), p = 2) the single-component candidate has the lower quotient;
  // the vector critical point sits higher, and swapping components maps minimizer to minimizer.
  auto params = make_params(5, 2.0, {{1.0, 1.0}, 0.01});
  const auto r = minimize_J(grid52(), params);
  EXPECT_TRUE(r.semi_trivial);
  EXPECT_LT(rel(r.alpha_min, scalar52().alpha_min), 1e-9);
  double vector_J = 0.0;
  for (const auto& c : r.candidates)
    if (c.label == "vector/per-component") vector_J = c.J;
  EXPECT_GT(vector_J, 1.5 * r.alpha_min);
  RadialField swapped(r.minimizer.grid_ptr(), 2);
  std::copy(r.minimizer[0].begin(), r.minimizer[0].end(), swapped[1].begin());
  std::copy(r.minimizer[1].begin(), r.minimizer[1].end(), swapped[0].begin());
  EXPECT_LT(rel(gn_quotient(swapped, params), r.alpha_min), 1e-14);
}

TEST(ClosedForm, MassCriticalReduction) {
  // p = 1 + 4/N: C = min mu * 4p / (N (p - 1) ||w||^{2p-2}).
  const double n = 4, p = 2, norm = 3.0;
  EXPECT_NEAR(closed_form_C(4, 2.0, {2.0, 1.5}, norm), 1.5 * 4 * p / (n * (p - 1) * std::pow(norm, 2 * p - 2)), 1e-15);
}

TEST(ClosedForm, ProportionalToMinMu) {
  const double base = closed_form_C(5, 2.0, {1.0}, 10.0);
  EXPECT_NEAR(closed_form_C(5, 2.0, {3.0, 2.0}, 10.0), 2.0 * base, 1e-15 * base);
  EXPECT_GT(base, 0.0);
}

TEST(CrossValidate, ScalarThreeWay) {
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  const auto cv = cross_validate(scalar52(), w52(), {{1.0}, 0.0}, params);
  EXPECT_TRUE(cv.in_regime);
  EXPECT_EQ(cv.ansatz_outcome, "PASS");
  EXPECT_LT(cv.gap_variational_ansatz, 1e-4);
  // The printed closed form exceeds the variational constant by the factor 2p.
  EXPECT_NEAR(cv.closed_over_variational, 4.0, 1e-3);
  EXPECT_EQ(cv.outcome, "FAIL");
}

TEST(CrossValidate, LargeBetaIsOutOfRegime) {
  auto params = make_params(5, 2.0, {{1.0, 1.0}, 10.0});
  const auto gn = minimize_J(grid52(), params);
  const auto cv = cross_validate(gn, w52(), {{1.0, 1.0}, 10.0}, params);
  EXPECT_FALSE(cv.in_regime);
  EXPECT_EQ(cv.outcome, "OUT-OF-REGIME");
}

TEST(CrossValidate, AmplitudeFunctionBound) {
  const std::vector<double> mu{1.0, 2.0};
  const auto A = ansatz_amplitudes(5, 2.0, mu, scalar52().alpha_min);
  EXPECT_GT(amplitude_function(A, mu, 0.0, 2.0), 1.0 / mu[0]);
  EXPECT_NEAR(ansatz_dilation(5, 2.0), std::pow(3.0 / 5.0, 0.25), 1e-15);
}

TEST(Inequality, ProbesRespectComputedConstant) {
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  const auto probes = probe_corpus(grid52(), 1, 200, 2024);
  const auto rep = check_gn_inequality(scalar52().C_best, probes, params, &scalar52().minimizer);
  EXPECT_EQ(rep.probes, 200);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_LT(rep.max_ratio, 1.0);
  EXPECT_NEAR(rep.minimizer_ratio, 1.0, 1e-8);
}

TEST(Inequality, CorpusIsSeeded) {
  const auto a = probe_corpus(grid52(), 2, 5, 11);
  const auto b = probe_corpus(grid52(), 2, 5, 11);
  const auto c = probe_corpus(grid52(), 2, 5, 12);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(a[k].values(), b[k].values());
  EXPECT_NE(a[0].values(), c[0].values());
}
