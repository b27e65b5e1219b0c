#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bcnls/diagnostics.hpp"
#include "bcnls/grid.hpp"
#include "bcnls/spectral.hpp"

using namespace bcnls;

namespace {

double gaussian(double r) { return std::exp(-0.5 * r * r); }

// Delta of exp(-r^2/2) in R^N is (r^2 - N) exp(-r^2/2); applying Delta once more gives
// ((r^2 - N)^2 - 4 r^2 + 2N) exp(-r^2/2).
double gaussian_lap(int n, double r) { return (r * r - n) * gaussian(r); }
double gaussian_bilap(int n, double r) {
  const double q = r * r - n;
  return (q * q - 4.0 * r * r + 2.0 * n) * gaussian(r);
}

double max_error_inside(const RadialGrid& g, const std::vector<double>& got, double (*exact)(int, double),
                        double rmax) {
  double err = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (g.nodes()[i] > rmax) break;
    err = std::max(err, std::abs(got[i] - exact(g.dimension(), g.nodes()[i])));
  }
  return err;
}

struct SilenceWarnings {
  SilenceWarnings() { previous = set_warning_handler([](const std::string&) {}); }
  ~SilenceWarnings() { set_warning_handler(previous); }
  WarningHandler previous;
};

}  // namespace

TEST(RadialGrid, StaggeredNodesAndPositiveWeights) {
  RadialGrid g(5, 10.0, 100);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.1);
  EXPECT_DOUBLE_EQ(g.nodes().front(), 0.05);
  EXPECT_DOUBLE_EQ(g.nodes().back(), 9.95);
  for (double w : g.weights()) EXPECT_GT(w, 0.0);
  EXPECT_NEAR(g.sphere_area(), 8.0 * std::numbers::pi * std::numbers::pi / 3.0, 1e-13);
}

TEST(RadialLaplacian, ConstantIsAnnihilatedAwayFromBoundary) {
  auto g = RadialGrid::make(5, 10.0, 200);
  std::vector<double> c(200, 3.0);
  auto lc = radial_laplacian(*g, c);
  for (int i = 0; i + 1 < 200; ++i) EXPECT_NEAR(lc[i], 0.0, 1e-9);
}

TEST(RadialLaplacian, QuadraticIsExact) {
  for (int n : {4, 5, 6, 9}) {
    auto g = RadialGrid::make(n, 5.0, 300);
    std::vector<double> f(300);
    for (int i = 0; i < 300; ++i) f[i] = g->nodes()[i] * g->nodes()[i];
    auto lf = radial_laplacian(*g, f);
    for (int i = 0; i + 1 < 300; ++i) EXPECT_NEAR(lf[i], 2.0 * n, 1e-8) << "N=" << n << " i=" << i;
  }
}

TEST(RadialLaplacian, GaussianSecondOrder) {
  double prev = 0.0;
  for (int n : {500, 1000, 2000}) {
    auto g = RadialGrid::make(5, 12.0, n);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = gaussian(g->nodes()[i]);
    const double err = max_error_inside(*g, radial_laplacian(*g, f), gaussian_lap, 10.0);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.3);
    prev = err;
  }
  EXPECT_LT(prev, 2e-4);
}

TEST(RadialBilaplacian, ZeroField) {
  auto g = RadialGrid::make(4, 5.0, 50);
  for (double v : radial_bilaplacian(*g, std::vector<double>(50, 0.0))) EXPECT_EQ(v, 0.0);
}

TEST(RadialBilaplacian, QuarticInDimensionFour) {
  // Delta r^4 = (4N+8) r^2 and Delta r^2 = 2N, so Delta^2 r^4 = 192 at N = 4.
  auto g = RadialGrid::make(4, 2.0, 400);
  std::vector<double> f(400);
  for (int i = 0; i < 400; ++i) f[i] = std::pow(g->nodes()[i], 4);
  auto b = radial_bilaplacian(*g, f);
  // The first rows carry the O(1) local error of the composed origin stencil; it decays within a few nodes.
  for (int i = 4; i + 2 < 400; ++i) EXPECT_NEAR(b[i], 192.0, 1e-4) << i;
}

TEST(RadialBilaplacian, GaussianSecondOrder) {
  double prev_l2 = 0.0, prev_sup = 0.0;
  for (int n : {500, 1000, 2000}) {
    auto g = RadialGrid::make(5, 12.0, n);
    std::vector<double> f(n), exact(n);
    for (int i = 0; i < n; ++i) {
      f[i] = gaussian(g->nodes()[i]);
      exact[i] = gaussian_bilap(5, g->nodes()[i]);
    }
    const auto b = radial_bilaplacian(*g, f);
    double num = 0.0, den = 0.0, sup = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = b[i] - exact[i];
      num += g->weights()[i] * d * d;
      den += g->weights()[i] * exact[i] * exact[i];
      if (g->nodes()[i] >= 0.5 && g->nodes()[i] <= 10.0) sup = std::max(sup, std::abs(d));
    }
    const double l2 = std::sqrt(num / den);
    if (prev_l2 > 0.0) {
      EXPECT_NEAR(prev_l2 / l2, 4.0, 0.3);
      EXPECT_NEAR(prev_sup / sup, 4.0, 0.3);
    }
    prev_l2 = l2;
    prev_sup = sup;
  }
  EXPECT_LT(prev_l2, 1e-4);
}

TEST(RadialLaplacian, SelfAdjointInQuadrature) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {4, 5, 6}) {
    auto g = RadialGrid::make(n, 15.0, 1500);
    std::vector<double> f(1500), h(1500);
    const double a = u(rng), b = u(rng), c = 1.0 + std::abs(u(rng));
    for (int i = 0; i < 1500; ++i) {
      const double r = g->nodes()[i];
      f[i] = (1.0 + a * r) * std::exp(-r * r / c);
      h[i] = (b + r * r) * std::exp(-0.7 * r * r);
    }
    const double lhs = radial_dot(*g, radial_laplacian(*g, f), h);
    const double rhs = radial_dot(*g, f, radial_laplacian(*g, h));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(RadialLaplacian, GridMismatch) {
  auto g = RadialGrid::make(5, 10.0, 100);
  auto other = RadialGrid::make(5, 11.0, 100);
  RadialField f(other, 1);
  EXPECT_THROW(radial_laplacian(*g, f), GridMismatch);
}

TEST(RadialIntegral, GaussianMoments) {
  SilenceWarnings quiet;
  for (int n : {4, 5, 6}) {
    for (double a : {0.5, 1.0, 2.0}) {
      auto g = RadialGrid::make(n, 15.0, 2000);
      std::vector<double> f(2000);
      for (int i = 0; i < 2000; ++i) f[i] = std::exp(-a * g->nodes()[i] * g->nodes()[i]);
      const double exact = std::pow(std::numbers::pi / a, n / 2.0);
      EXPECT_NEAR(radial_integral(*g, f) / exact, 1.0, 1e-6) << "N=" << n << " a=" << a;
    }
  }
  auto g = RadialGrid::make(4, 10.0, 1000);
  EXPECT_EQ(radial_integral(*g, std::vector<double>(1000, 0.0)), 0.0);
}

TEST(RadialIntegral, WarnsWithoutDecay) {
  int warnings = 0;
  auto previous = set_warning_handler([&](const std::string&) { ++warnings; });
  auto g = RadialGrid::make(4, 3.0, 300);
  std::vector<double> f(300);
  for (int i = 0; i < 300; ++i) f[i] = std::exp(-g->nodes()[i]);
  radial_integral(*g, f);
  set_warning_handler(previous);
  EXPECT_EQ(warnings, 1);
}

TEST(RadialBiharmonicSolver, InvertsOperator) {
  auto g = RadialGrid::make(5, 20.0, 4000);
  RadialBiharmonicSolver solver(g, 1.0, 1.0);
  std::vector<double> f(4000);
  for (int i = 0; i < 4000; ++i) f[i] = gaussian(g->nodes()[i]) * (1.0 + g->nodes()[i]);
  auto u = solver.solve(f);
  auto b = radial_bilaplacian(*g, u);
  double err = 0.0;
  for (int i = 0; i < 4000; ++i) err = std::max(err, std::abs(b[i] + u[i] - f[i]));
  // Forward application of Delta^2 amplifies roundoff by ~16/h^4.
  EXPECT_LT(err, 1e-4);

  RadialBiharmonicSolver scaled(g, 2.5, 0.75);
  auto v = scaled.solve(f);
  auto bv = radial_bilaplacian(*g, v);
  err = 0.0;
  for (int i = 0; i < 4000; ++i) err = std::max(err, std::abs(2.5 * bv[i] + 0.75 * v[i] - f[i]));
  EXPECT_LT(err, 1e-5);
}

TEST(RadialBiharmonicSolver, RejectsBadCoefficients) {
  auto g = RadialGrid::make(5, 20.0, 100);
  EXPECT_THROW(RadialBiharmonicSolver(g, 1.0, 0.0), ValidationError);
}

TEST(RescaleField, IdentityAndAmplitude) {
  auto g = RadialGrid::make(5, 12.0, 600);
  auto f = RadialField::sample(g, 1, [](int, double r) { return gaussian(r); });
  auto same = rescale_field(f, 1.0, 1.0);
  EXPECT_EQ(same.values(), f.values());
  auto doubled = rescale_field(f, 2.0, 1.0);
  for (int i = 0; i < 600; ++i) EXPECT_EQ(doubled.values()[i], 2.0 * f.values()[i]);
}

TEST(RescaleField, NormIdentity) {
  SilenceWarnings quiet;
  for (int n : {4, 5, 6}) {
    auto g = RadialGrid::make(n, 12.0, 2400);
    auto f = RadialField::sample(g, 1, [](int, double r) { return gaussian(r); });
    RescaleReport report;
    auto s = rescale_field(f, 1.0, 2.0, &report);
    EXPECT_FALSE(report.truncated);
    const double ratio = radial_dot(*g, s[0], s[0]) / radial_dot(*g, f[0], f[0]);
    EXPECT_NEAR(ratio / std::pow(2.0, -n), 1.0, 1e-6);
  }
}

TEST(RescaleField, ReportsTruncation) {
  auto g = RadialGrid::make(4, 6.0, 600);
  auto f = RadialField::sample(g, 1, [](int, double r) { return gaussian(r); });
  RescaleReport report;
  rescale_field(f, 1.0, 0.25, &report);
  EXPECT_TRUE(report.truncated);
  EXPECT_GT(report.truncated_fraction, 1e-3);
}

TEST(PeriodicGrid, WavenumbersAndSymbol) {
  PeriodicGrid g(4, 8, 3.0);
  const double dk = std::numbers::pi / 3.0;
  EXPECT_DOUBLE_EQ(g.wavenumbers()[1], dk);
  EXPECT_DOUBLE_EQ(g.wavenumbers()[4], -4 * dk);
  EXPECT_DOUBLE_EQ(g.wavenumbers()[7], -dk);
  const auto sym = bilaplacian_symbol(g);
  EXPECT_EQ(sym[0], 0.0);
  // k = (pi/L, 0, 0, 0) sits at flat index 8^3.
  EXPECT_NEAR(sym[512], std::pow(dk, 4), 1e-14);
  EXPECT_THROW(PeriodicGrid(2, 7, 1.0), ValidationError);
}

TEST(Spectral, RoundTrip) {
  auto g = PeriodicGrid::make(3, 8, 2.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  ComplexField u(g, 2);
  for (auto& v : u.values()) v = {nd(rng), nd(rng)};
  ComplexField copy = u;
  SpectralTransform fft(*g, 2);
  fft.forward(copy.values());
  fft.backward(copy.values());
  for (std::size_t i = 0; i < u.values().size(); ++i) EXPECT_NEAR(std::abs(copy.values()[i] - u.values()[i]), 0.0, 1e-13);
}

TEST(Spectral, BilaplacianOfFourierMode) {
  auto g = PeriodicGrid::make(2, 16, std::numbers::pi);
  const int kx = 3, ky = -2;
  auto u = ComplexField::sample(g, 1, [&](int, std::span<const double> x) {
    return std::exp(std::complex<double>(0.0, kx * x[0] + ky * x[1]));
  });
  auto b = spectral_bilaplacian(u);
  const double k4 = std::pow(kx * kx + ky * ky, 2);
  for (std::size_t i = 0; i < u.points(); ++i) EXPECT_NEAR(std::abs(b[0][i] - k4 * u[0][i]), 0.0, 1e-10);
}

TEST(PeriodicRescale, IntegerDilation) {
  auto g = PeriodicGrid::make(1, 16, 4.0);
  auto u = ComplexField::sample(g, 1, [](int, std::span<const double> x) { return std::complex<double>(x[0], 0.0); });
  auto s = rescale_field(u, 3.0, 2);
  // x_i = -4 + i/2; at x = 1 (i = 10) expect 3 * u(2) = 6.
  EXPECT_NEAR(s[0][10].real(), 6.0, 1e-14);
}

TEST(Transplant, CentredProfile) {
  auto rg = RadialGrid::make(2, 8.0, 800);
  auto prof = RadialField::sample(rg, 1, [](int, double r) { return gaussian(r); });
  auto box = PeriodicGrid::make(2, 32, 6.0);
  auto u = transplant(prof, box);
  std::vector<int> idx(2);
  double err = 0.0;
  for (std::size_t p = 0; p < u.points(); ++p) {
    box->unflatten(p, idx);
    const double r = std::hypot(box->coordinate(idx[0]), box->coordinate(idx[1]));
    err = std::max(err, std::abs(u[0][p].real() - gaussian(r)));
  }
  EXPECT_LT(err, 1e-7);
  EXPECT_THROW(transplant(prof, PeriodicGrid::make(3, 8, 6.0)), GridMismatch);
}
