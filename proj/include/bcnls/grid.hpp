#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bcnls/error.hpp"

namespace bcnls {

/// Uniform staggered grid r_i = (i - 1/2) h, i = 1..n, on (0, R] for radial functions in R^N.
///
/// The Laplacian is a three-point flux form whose interface coefficients are built from the
/// midpoint quadrature itself, so that
///   - it is self-adjoint in the quadrature inner product,
///   - it reproduces Delta const = 0 and Delta r^2 = 2N exactly,
///   - it closes with f'(0) = 0 at the origin and a zero ghost f(R) = 0 at the outer edge.
/// Operators scale exactly as h^-2 and weights as h^N, so rescaling h is an exact dilation.
class RadialGrid {
 public:
  RadialGrid(int dimension, double radius, int points);

  static std::shared_ptr<const RadialGrid> make(int dimension, double radius, int points) {
    return std::make_shared<const RadialGrid>(dimension, radius, points);
  }

  int dimension() const noexcept { return dimension_; }
  double radius() const noexcept { return radius_; }
  int size() const noexcept { return points_; }
  double spacing() const noexcept { return h_; }
  /// omega_{N-1} = 2 pi^{N/2} / Gamma(N/2).
  double sphere_area() const noexcept { return sphere_area_; }

  const std::vector<double>& nodes() const noexcept { return r_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  const std::vector<double>& sqrt_weights() const noexcept { return sqrt_w_; }

  /// Tridiagonal Laplacian rows: (Lf)_i = lower_i f_{i-1} + diag_i f_i + upper_i f_{i+1}.
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& diag() const noexcept { return diag_; }
  const std::vector<double>& upper() const noexcept { return upper_; }

  /// Off-diagonal of the symmetrized Laplacian W^{1/2} L W^{-1/2} (entry i couples i, i+1).
  const std::vector<double>& sym_offdiag() const noexcept { return sym_off_; }

  /// Same node layout with every length multiplied by `factor` (radius factor * R).
  std::shared_ptr<const RadialGrid> dilated(double factor) const;

  bool same_as(const RadialGrid& other) const noexcept {
    return dimension_ == other.dimension_ && points_ == other.points_ && radius_ == other.radius_;
  }

  /// FNV-1a over (kind, N, n, R); used for report provenance.
  std::uint64_t fingerprint() const noexcept;

 private:
  int dimension_;
  double radius_;
  int points_;
  double h_;
  double sphere_area_;
  std::vector<double> r_, w_, sqrt_w_;
  std::vector<double> lower_, diag_, upper_, sym_off_;
};

using RadialGridPtr = std::shared_ptr<const RadialGrid>;

/// m real radial components sampled on a RadialGrid, stored component-major.
class RadialField {
 public:
  RadialField() = default;
  RadialField(RadialGridPtr grid, int components);
  RadialField(RadialGridPtr grid, int components, std::vector<double> values);

  /// Samples fn(component, r) at every node.
  static RadialField sample(RadialGridPtr grid, int components,
                            const std::function<double(int, double)>& fn);

  const RadialGrid& grid() const { return *grid_; }
  const RadialGridPtr& grid_ptr() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  int size() const noexcept { return grid_ ? grid_->size() : 0; }

  std::span<double> operator[](int j) {
    return {values_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(size()),
            static_cast<std::size_t>(size())};
  }
  std::span<const double> operator[](int j) const {
    return {values_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(size()),
            static_cast<std::size_t>(size())};
  }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Same values reinterpreted on another grid with the same node count (exact dilation).
  RadialField on_grid(RadialGridPtr grid) const;

  RadialField& operator*=(double s);
  bool all_finite() const;
  double sup_norm() const;
  double sup_norm(int j) const;

 private:
  RadialGridPtr grid_;
  int components_ = 0;
  std::vector<double> values_;
};

RadialField operator*(double s, RadialField f);
RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);

/// Throws GridMismatch unless both live on the same grid.
void require_same_grid(const RadialGrid& a, const RadialGrid& b);

/// Delta f for one radial component.
void radial_laplacian(const RadialGrid& g, std::span<const double> f, std::span<double> out);
std::vector<double> radial_laplacian(const RadialGrid& g, std::span<const double> f);
RadialField radial_laplacian(const RadialGrid& g, const RadialField& f);

/// Delta^2 f = Delta(Delta f), intermediate Delta f(R) = 0. Second order in the weighted norm;
/// the first two rows have an O(1) local consistency error that decays within a few nodes.
std::vector<double> radial_bilaplacian(const RadialGrid& g, std::span<const double> f);
RadialField radial_bilaplacian(const RadialGrid& g, const RadialField& f);

/// Sum_i weights_i f_i ~ int_{R^N} f dx. Warns when f has not decayed over [0.9R, R].
double radial_integral(const RadialGrid& g, std::span<const double> f);

/// max |f| on [0.9R, R] relative to max |f| (0 for the zero field).
double tail_fraction(const RadialGrid& g, std::span<const double> f);

/// Weighted inner product <f, g> = Sum weights f g.
double radial_dot(const RadialGrid& g, std::span<const double> f, std::span<const double> h);

struct RescaleReport {
  /// max |f(s)| over the part of the dilated support pushed beyond R, relative to max |f|.
  double truncated_fraction = 0.0;
  bool truncated = false;
};

/// nu * f(mu r) on the same grid by four-point cubic interpolation (even extension at r = 0,
/// zero beyond R). `report` records mass pushed outside the domain when mu < 1.
RadialField rescale_field(const RadialField& f, double nu, double mu, RescaleReport* report = nullptr,
                          double truncation_tol = 1e-8);

/// Solves (a Delta^2 + b) u = f on a RadialGrid. The symmetrized operator is split into two
/// complex-shifted tridiagonal factors, factorized once in the constructor.
class RadialBiharmonicSolver {
 public:
  RadialBiharmonicSolver(RadialGridPtr grid, double a, double b);
  RadialBiharmonicSolver(RadialBiharmonicSolver&&) noexcept;
  RadialBiharmonicSolver& operator=(RadialBiharmonicSolver&&) noexcept;
  ~RadialBiharmonicSolver();

  void solve(std::span<const double> rhs, std::span<double> out) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  double fourth_order_coefficient() const noexcept { return a_; }
  double zeroth_order_coefficient() const noexcept { return b_; }
  const RadialGrid& grid() const { return *grid_; }

 private:
  struct Factor;
  RadialGridPtr grid_;
  double a_, b_;
  std::unique_ptr<Factor> factor_;
};

// ---------------------------------------------------------------------------------------------
// Periodic box

/// Box [-L, L)^d with n points per dimension (n even). Wavenumber k_i = (pi/L) * signed index.
class PeriodicGrid {
 public:
  PeriodicGrid(int dims, int points_per_dim, double half_period);

  static std::shared_ptr<const PeriodicGrid> make(int dims, int points_per_dim, double half_period) {
    return std::make_shared<const PeriodicGrid>(dims, points_per_dim, half_period);
  }

  int dims() const noexcept { return dims_; }
  int points_per_dim() const noexcept { return n_; }
  double half_period() const noexcept { return L_; }
  double spacing() const noexcept { return 2.0 * L_ / n_; }
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t total_points() const noexcept { return total_; }

  /// Signed frequencies times pi/L, FFT order.
  const std::vector<double>& wavenumbers() const noexcept { return k_; }
  /// Coordinate x_i = -L + i dx along one dimension.
  double coordinate(int i) const noexcept { return -L_ + i * spacing(); }

  /// Multi-index of a flat (row-major, last dimension fastest) position.
  void unflatten(std::size_t flat, std::span<int> index) const;

  bool same_as(const PeriodicGrid& o) const noexcept {
    return dims_ == o.dims_ && n_ == o.n_ && L_ == o.L_;
  }
  std::uint64_t fingerprint() const noexcept;

 private:
  int dims_;
  int n_;
  double L_;
  double cell_volume_;
  std::size_t total_;
  std::vector<double> k_;
};

using PeriodicGridPtr = std::shared_ptr<const PeriodicGrid>;

/// (sum_i k_i^2)^2 at every multi-index, flat row-major.
std::vector<double> bilaplacian_symbol(const PeriodicGrid& g);

/// Largest-index shell: max |u_hat| over modes touching the Nyquist index, relative to the peak.
double nyquist_fraction(const PeriodicGrid& g, std::span<const std::complex<double>> spectrum);

/// m complex components on a PeriodicGrid, component-major.
class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(PeriodicGridPtr grid, int components);
  ComplexField(PeriodicGridPtr grid, int components, std::vector<std::complex<double>> values);

  /// Samples fn(component, x) at every lattice point; x has grid.dims() entries.
  static ComplexField sample(PeriodicGridPtr grid, int components,
                             const std::function<std::complex<double>(int, std::span<const double>)>& fn);

  const PeriodicGrid& grid() const { return *grid_; }
  const PeriodicGridPtr& grid_ptr() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t points() const noexcept { return grid_ ? grid_->total_points() : 0; }

  std::span<std::complex<double>> operator[](int j) {
    return {values_.data() + static_cast<std::size_t>(j) * points(), points()};
  }
  std::span<const std::complex<double>> operator[](int j) const {
    return {values_.data() + static_cast<std::size_t>(j) * points(), points()};
  }
  std::vector<std::complex<double>>& values() noexcept { return values_; }
  const std::vector<std::complex<double>>& values() const noexcept { return values_; }

  ComplexField& operator*=(std::complex<double> s);
  bool all_finite() const;

 private:
  PeriodicGridPtr grid_;
  int components_ = 0;
  std::vector<std::complex<double>> values_;
};

/// nu * f(mu x) for positive integer mu (the lattice maps onto itself modulo the period).
ComplexField rescale_field(const ComplexField& f, double nu, int mu);

/// Radial profile interpolated onto the box lattice, centred at the box midpoint.
ComplexField transplant(const RadialField& profile, PeriodicGridPtr box);

}  // namespace bcnls
