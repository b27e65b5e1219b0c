#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bcnls/functionals.hpp"
#include "bcnls/gn.hpp"
#include "bcnls/groundstate.hpp"

using namespace bcnls;

namespace {

constexpr double kPi = std::numbers::pi;

RadialField gaussian(const RadialGridPtr& g, int m = 1, double width = 1.0) {
  return RadialField::sample(g, m, [=](int j, double r) { return (1.0 + 0.25 * j) * std::exp(-0.5 * r * r / (width * width)); });
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Potential, ZeroField) {
  auto g = RadialGrid::make(4, 10.0, 200);
  auto params = make_params(4, 3.0, {{1.0}, 0.0});
  EXPECT_EQ(potential(RadialField(g, 1), params), 0.0);
  EXPECT_EQ(energy(RadialField(g, 1), params), 0.0);
  EXPECT_EQ(action(RadialField(g, 1), params), 0.0);
}

TEST(Potential, GaussianQuarticIntegral) {
  // p = 2, N = 4: P = (mu/4) int exp(-2 r^2) dx = (mu/4) (pi/2)^2.
  auto g = RadialGrid::make(4, 12.0, 2000);
  auto params = make_params(4, 2.0, {{1.5}, 0.0}, {.allow_out_of_range = true});
  EXPECT_LT(rel(potential(gaussian(g), params), 1.5 / 4.0 * (kPi / 2) * (kPi / 2)), 1e-6);
}

TEST(Potential, VanishingSecondComponentReducesToScalar) {
  auto g = RadialGrid::make(5, 12.0, 1500);
  auto vec = make_params(5, 2.0, {{2.0, 3.0}, 0.7});
  auto one = make_params(5, 2.0, {{2.0}, 0.0});
  RadialField u(g, 2);
  auto s = gaussian(g);
  std::copy(s[0].begin(), s[0].end(), u[0].begin());
  EXPECT_DOUBLE_EQ(potential(u, vec), potential(s, one));
}

TEST(Kinetic, GaussianBilaplacianNorm) {
  // ||Delta exp(-r^2/2)||^2 = N(N+2)/4 pi^{N/2}; ||exp(-r^2/2)||^2 = pi^{N/2}.
  for (int n : {4, 5, 6}) {
    auto g = RadialGrid::make(n, 12.0, 4000);
    auto params = make_params(n, 1.0 + 4.0 / n + 0.5, {{1.0}, 0.0});
    const auto mom = compute_moments(gaussian(g), params);
    EXPECT_LT(rel(mom.kinetic, n * (n + 2) / 4.0 * std::pow(kPi, n / 2.0)), 1e-4) << n;
    EXPECT_LT(rel(mom.l2, std::pow(kPi, n / 2.0)), 1e-6) << n;
  }
}

TEST(Energy, IdentitiesBetweenFunctionals) {
  auto g = RadialGrid::make(5, 12.0, 1000);
  auto params = make_params(5, 2.0, {{1.0, 2.0}, 0.5});
  auto u = gaussian(g, 2);
  const auto mom = compute_moments(u, params);
  EXPECT_NEAR(energy(mom), mom.kinetic / 2 - potential(mom), 1e-12);
  EXPECT_NEAR(action(mom) - energy(mom), mom.l2 / 2, 1e-12);
  const auto mom2 = compute_moments(3.0 * u, params);
  EXPECT_LT(rel(mom2.kinetic, 9.0 * mom.kinetic), 1e-13);
}

TEST(Homogeneity, PotentialAndKineticPowerLaws) {
  auto g = RadialGrid::make(5, 12.0, 800);
  auto params = make_params(5, 1.9, {{1.0, 1.3}, 0.4});
  auto u = gaussian(g, 2);
  const auto base = compute_moments(u, params);
  for (double nu : {0.3, 1.7, 11.0}) {
    const auto m = compute_moments(nu * u, params);
    EXPECT_LT(rel(potential(m), std::pow(nu, 2 * 1.9) * potential(base)), 1e-13);
    EXPECT_LT(rel(m.kinetic, nu * nu * base.kinetic), 1e-13);
  }
}

TEST(Symmetry, PotentialInvariantUnderComponentPermutation) {
  auto g = RadialGrid::make(5, 12.0, 600);
  const CouplingMatrix a(3, {1.0, 0.3, 0.5, 0.3, 2.0, 0.7, 0.5, 0.7, 1.5});
  const CouplingMatrix b(3, {1.5, 0.7, 0.5, 0.7, 2.0, 0.3, 0.5, 0.3, 1.0});  // order (2, 1, 0)
  auto pa = validate({5, 3, 2.0, a});
  auto pb = validate({5, 3, 2.0, b});
  auto u = gaussian(g, 3);
  RadialField v(g, 3);
  for (int j = 0; j < 3; ++j) std::copy(u[2 - j].begin(), u[2 - j].end(), v[j].begin());
  EXPECT_LT(rel(potential(v, pb), potential(u, pa)), 1e-14);
}

TEST(Constraint, DecompositionIdentityOnRandomFields) {
  auto g = RadialGrid::make(5, 15.0, 1500);
  auto params = make_params(5, 2.0, {{1.0, 2.0}, 0.5});
  const auto probes = probe_corpus(g, 2, 10, 7);
  for (const auto& u : probes) {
    const auto mom = compute_moments(u, params);
    for (ScalingPair pr : {ScalingPair{1, 0}, ScalingPair{0, 1}, ScalingPair{1, 1}, ScalingPair{2, 3}}) {
      const double S = action(mom);
      const double rebuilt = functional_H(mom, pr) + constraint_K(mom, pr) / (2 * pr.alpha + 5 * pr.beta);
      EXPECT_LT(std::abs(rebuilt - S), 1e-12 * std::max(1.0, std::abs(S)));
    }
  }
}

TEST(Constraint, HAtPureDilationIsKineticOnly) {
  auto g = RadialGrid::make(6, 12.0, 1000);
  auto params = make_params(6, 2.0, {{1.0}, 0.0});
  const auto mom = compute_moments(gaussian(g), params);
  EXPECT_LT(rel(functional_H(mom, {0, 1}), 2.0 / 6.0 * mom.kinetic), 1e-13);
}

TEST(Constraint, QuadraticPartDominatesForSmallFields) {
  auto g = RadialGrid::make(5, 12.0, 1000);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  auto u = gaussian(g);
  const ScalingPair pr{1, 1};
  const double q = constraint_quadratic_part(compute_moments(u, params), pr);
  for (double eps : {1e-2, 1e-3}) {
    const double k = constraint_K(compute_moments(eps * u, params), pr);
    EXPECT_LT(rel(k / (eps * eps), q), 10 * eps * eps);
  }
  EXPECT_EQ(constraint_K(RadialField(g, 1), params, pr), 0.0);
}

TEST(Constraint, ZeroPairDenominatorIsDomainError) {
  auto g = RadialGrid::make(5, 12.0, 100);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  EXPECT_THROW(functional_H(compute_moments(gaussian(g), params), ScalingPair{0, 0}), DomainError);
  EXPECT_THROW(checked_pair(0, 0), ValidationError);
}

TEST(GNQuotient, UndefinedForZeroField) {
  auto g = RadialGrid::make(5, 12.0, 100);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  EXPECT_THROW(gn_quotient(RadialField(g, 1), params), DomainError);
}

TEST(GNQuotient, AmplitudeAndDilationInvariance) {
  auto g = RadialGrid::make(5, 15.0, 1500);
  auto params = make_params(5, 2.0, {{1.0, 1.0}, 0.3});
  auto u = gaussian(g, 2);
  const double J = gn_quotient(u, params);
  for (double nu : {0.1, 2.0, 17.0}) EXPECT_LT(rel(gn_quotient(nu * u, params), J), 1e-12);
  // Transport moves the values onto a dilated grid, an exact change of variables.
  for (double lam : {-0.3, 0.4}) {
    EXPECT_LT(rel(gn_quotient(scaling_flow(u, {0, 1}, lam, ScalingMode::transport), params), J), 1e-12);
  }
}

TEST(GNQuotient, MassCriticalExponents) {
  // At p = 1 + 4/N, J = kinetic * mass^{4/N} / P.
  auto g = RadialGrid::make(4, 12.0, 1000);
  auto params = make_params(4, 2.0, {{1.0}, 0.0}, {.allow_out_of_range = true});
  const auto mom = compute_moments(gaussian(g), params);
  EXPECT_LT(rel(gn_quotient(mom), mom.kinetic * mom.l2 / potential(mom)), 1e-14);
}

TEST(ScalingFlow, IdentityDoublingAndNormFactors) {
  auto g = RadialGrid::make(5, 20.0, 4000);
  auto u = gaussian(g);
  auto same = scaling_flow(u, {1, 1}, 0.0);
  for (int i = 0; i < g->size(); ++i) EXPECT_EQ(same[0][i], u[0][i]);
  auto doubled = scaling_flow(u, {1, 0}, std::log(2.0));
  for (int i = 0; i < g->size(); ++i) EXPECT_NEAR(doubled[0][i], 2.0 * u[0][i], 1e-15);

  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  const auto base = compute_moments(u, params);
  const ScalingPair pr{0.5, 1.0};
  const double lam = 0.2;
  const auto m = compute_moments(scaling_flow(u, pr, lam), params);
  EXPECT_LT(rel(m.kinetic, std::exp((2 * pr.alpha + (5 - 4) * pr.beta) * lam) * base.kinetic), 1e-4);
  EXPECT_LT(rel(m.l2, std::exp((2 * pr.alpha + 5 * pr.beta) * lam) * base.l2), 1e-6);
}

TEST(LieDerivative, SecondOrderOnGaussian) {
  auto g = RadialGrid::make(5, 15.0, 2000);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  const auto rep = lie_derivative_check(gaussian(g), params, {1, 1});
  ASSERT_EQ(rep.samples.size(), 3u);
  EXPECT_GE(rep.observed_order, 1.9);
  EXPECT_LT(rep.samples.back().error, 1e-3 * std::abs(rep.K));
}

TEST(LieDerivative, ZeroField) {
  auto g = RadialGrid::make(5, 15.0, 200);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  const auto rep = lie_derivative_check(RadialField(g, 1), params, {1, 0});
  EXPECT_EQ(rep.K, 0.0);
  for (const auto& s : rep.samples) EXPECT_EQ(s.finite_difference, 0.0);
}

TEST(ElResidual, ZeroConvergedAndPerturbed) {
  auto g = RadialGrid::make(5, 20.0, 2000);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  EXPECT_EQ(el_residual(RadialField(g, 1), params).weighted_sup, 0.0);
  PetviashviliOptions opts;
  const auto w = solve_scalar_w(g, 5, 2.0, opts);
  const double res = el_residual(w.profile, params).weighted_sup;
  EXPECT_LE(res, opts.tol);
  auto bumped = w.profile;
  for (int i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    bumped[0][i] += 0.01 * std::exp(-(r - 2.0) * (r - 2.0));
  }
  EXPECT_GE(el_residual(bumped, params).weighted_sup, 10 * opts.tol);
}

TEST(FunctionalReport, ColumnsAndValues) {
  const auto cols = functional_report_columns(2);
  const std::vector<std::string> expected{"mass_1", "mass_2", "kinetic", "l2", "potential", "energy",
                                          "action", "K_alpha_beta", "H_alpha_beta", "J"};
  EXPECT_EQ(cols, expected);
  auto g = RadialGrid::make(5, 12.0, 400);
  auto params = make_params(5, 2.0, {{1.0, 1.0}, 0.5});
  const auto rep = functional_report(compute_moments(gaussian(g, 2), params));
  const auto vals = functional_report_values(rep);
  ASSERT_EQ(vals.size(), cols.size());
  EXPECT_TRUE(std::isnan(vals[7]));
  EXPECT_FALSE(std::isnan(vals[9]));
}

TEST(BoxMoments, GaussianSpectralKinetic) {
  auto box = PeriodicGrid::make(4, 32, 8.0);
  auto params = make_params(4, 3.0, {{1.0}, 0.0});
  auto u = ComplexField::sample(box, 1, [](int, std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::complex<double>(std::exp(-0.5 * r2), 0.0);
  });
  const auto mom = compute_moments(u, params);
  EXPECT_LT(rel(mom.l2, kPi * kPi), 1e-9);
  EXPECT_LT(rel(mom.kinetic, 6.0 * kPi * kPi), 1e-6);
}
