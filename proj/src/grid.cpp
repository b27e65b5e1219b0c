#include "bcnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <optional>
#include <sstream>

#include "bcnls/diagnostics.hpp"

namespace bcnls {
namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class... T>
std::uint64_t fingerprint_of(const T&... parts) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  ((h = fnv1a(h, &parts, sizeof(parts))), ...);
  return h;
}

// LU of the complex symmetric tridiagonal S - i c with S real symmetric negative definite.
// Its Hermitian part is definite, so elimination without pivoting is stable.
class ShiftedTridiagonal {
 public:
  ShiftedTridiagonal(const std::vector<double>& diag, const std::vector<double>& off, double shift)
      : off_(off), pivot_(diag.size()), mult_(diag.size()) {
    const std::complex<double> is(0.0, shift);
    pivot_[0] = diag[0] - is;
    for (std::size_t i = 1; i < diag.size(); ++i) {
      mult_[i] = off_[i - 1] / pivot_[i - 1];
      pivot_[i] = diag[i] - is - mult_[i] * off_[i - 1];
    }
  }

  // Solves (S - i c) x = x in place, or (S + i c) x = x when `conjugate` is set.
  void solve_in_place(std::span<std::complex<double>> x, bool conjugate) const {
    auto c = [conjugate](std::complex<double> z) { return conjugate ? std::conj(z) : z; };
    const std::size_t n = x.size();
    for (std::size_t i = 1; i < n; ++i) x[i] -= c(mult_[i]) * x[i - 1];
    x[n - 1] /= c(pivot_[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - off_[i] * x[i + 1]) / c(pivot_[i]);
  }

 private:
  std::vector<double> off_;
  std::vector<std::complex<double>> pivot_, mult_;
};

double cubic_sample(std::span<const double> f, double h, double s) {
  const int n = static_cast<int>(f.size());
  const double t = s / h - 0.5;
  const int i0 = static_cast<int>(std::floor(t));
  const double u = t - i0;
  auto value = [&](int k) -> double {
    if (k < 0) k = -k - 1;  // even extension through r = 0
    return k < n ? f[k] : 0.0;
  };
  const double fm = value(i0 - 1), f0 = value(i0), f1 = value(i0 + 1), f2 = value(i0 + 2);
  const double wm = -u * (u - 1.0) * (u - 2.0) / 6.0;
  const double w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  const double w1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
  const double w2 = (u + 1.0) * u * (u - 1.0) / 6.0;
  return wm * fm + w0 * f0 + w1 * f1 + w2 * f2;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

RadialGrid::RadialGrid(int dimension, double radius, int points)
    : dimension_(dimension), radius_(radius), points_(points) {
  if (dimension < 1) throw ValidationError(ValidationKind::dimension, "radial grid needs N >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius) || points < 4) {
    throw ValidationError(ValidationKind::options, "radial grid needs R > 0 and at least 4 points");
  }
  h_ = radius / points;
  const double n_dim = dimension;
  sphere_area_ = 2.0 * std::pow(std::numbers::pi, n_dim / 2.0) / std::tgamma(n_dim / 2.0);

  const auto n = static_cast<std::size_t>(points);
  r_.resize(n);
  w_.resize(n);
  sqrt_w_.resize(n);
  lower_.assign(n, 0.0);
  diag_.assign(n, 0.0);
  upper_.assign(n, 0.0);
  sym_off_.assign(n, 0.0);

  // Work in node units x_i = i - 1/2 so nothing depends on h until the final scaling.
  std::vector<double> rho(n);  // x_i^{N-1}
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) + 0.5;
    r_[i] = x * h_;
    rho[i] = std::pow(x, n_dim - 1.0);
    w_[i] = sphere_area_ * std::pow(h_, n_dim) * rho[i];
    sqrt_w_[i] = std::sqrt(w_[i]);
  }
  // Interface coefficient at x = i (between nodes i-1 and i in 0-based indexing):
  // flux[i] = N * sum_{k < i} rho_k / i, the midpoint estimate of x^{N-1} that makes r^2 exact.
  std::vector<double> flux(n + 1, 0.0);
  double cumulative = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cumulative += rho[i - 1];
    flux[i] = n_dim * cumulative / static_cast<double>(i);
  }
  const double inv_h2 = 1.0 / (h_ * h_);
  for (std::size_t i = 0; i < n; ++i) {
    upper_[i] = flux[i + 1] / rho[i] * inv_h2;
    lower_[i] = flux[i] / rho[i] * inv_h2;
    diag_[i] = -(upper_[i] + lower_[i]);
  }
  upper_[n - 1] = 0.0;  // zero ghost beyond R; the flux still enters the diagonal
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sym_off_[i] = flux[i + 1] / std::sqrt(rho[i] * rho[i + 1]) * inv_h2;
  }
}

std::shared_ptr<const RadialGrid> RadialGrid::dilated(double factor) const {
  return make(dimension_, radius_ * factor, points_);
}

std::uint64_t RadialGrid::fingerprint() const noexcept {
  const int kind = 0;
  return fingerprint_of(kind, dimension_, points_, radius_);
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (!a.same_as(b)) {
    std::ostringstream os;
    os << "grid mismatch: (N=" << a.dimension() << ", R=" << a.radius() << ", n=" << a.size() << ") vs (N="
       << b.dimension() << ", R=" << b.radius() << ", n=" << b.size() << ")";
    throw GridMismatch(os.str());
  }
}

// ---------------------------------------------------------------------------------------------

RadialField::RadialField(RadialGridPtr grid, int components)
    : grid_(std::move(grid)), components_(components),
      values_(static_cast<std::size_t>(components) * static_cast<std::size_t>(grid_->size()), 0.0) {}

RadialField::RadialField(RadialGridPtr grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(components) * static_cast<std::size_t>(grid_->size())) {
    throw GridMismatch("radial field payload does not match grid size");
  }
}

RadialField RadialField::sample(RadialGridPtr grid, int components,
                                const std::function<double(int, double)>& fn) {
  RadialField f(grid, components);
  const auto& r = grid->nodes();
  for (int j = 0; j < components; ++j) {
    auto c = f[j];
    for (std::size_t i = 0; i < r.size(); ++i) c[i] = fn(j, r[i]);
  }
  return f;
}

RadialField RadialField::on_grid(RadialGridPtr grid) const {
  if (grid->size() != size()) throw GridMismatch("on_grid: node count differs");
  return RadialField(std::move(grid), components_, values_);
}

RadialField& RadialField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

bool RadialField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double RadialField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double RadialField::sup_norm(int j) const {
  double m = 0.0;
  for (double v : (*this)[j]) m = std::max(m, std::abs(v));
  return m;
}

RadialField operator*(double s, RadialField f) {
  f *= s;
  return f;
}

RadialField operator+(const RadialField& a, const RadialField& b) {
  require_same_grid(a.grid(), b.grid());
  RadialField out = a;
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] += b.values()[i];
  return out;
}

RadialField operator-(const RadialField& a, const RadialField& b) {
  require_same_grid(a.grid(), b.grid());
  RadialField out = a;
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] -= b.values()[i];
  return out;
}

// ---------------------------------------------------------------------------------------------

void radial_laplacian(const RadialGrid& g, std::span<const double> f, std::span<double> out) {
  const auto n = static_cast<std::size_t>(g.size());
  if (f.size() != n || out.size() != n) throw GridMismatch("radial_laplacian: length differs from grid");
  const auto& lo = g.lower();
  const auto& d = g.diag();
  const auto& up = g.upper();
  out[0] = d[0] * f[0] + up[0] * f[1];
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = lo[i] * f[i - 1] + d[i] * f[i] + up[i] * f[i + 1];
  out[n - 1] = lo[n - 1] * f[n - 2] + d[n - 1] * f[n - 1];
}

std::vector<double> radial_laplacian(const RadialGrid& g, std::span<const double> f) {
  std::vector<double> out(f.size());
  radial_laplacian(g, f, out);
  return out;
}

RadialField radial_laplacian(const RadialGrid& g, const RadialField& f) {
  require_same_grid(g, f.grid());
  RadialField out(f.grid_ptr(), f.components());
  for (int j = 0; j < f.components(); ++j) radial_laplacian(g, f[j], out[j]);
  return out;
}

std::vector<double> radial_bilaplacian(const RadialGrid& g, std::span<const double> f) {
  auto lf = radial_laplacian(g, f);
  return radial_laplacian(g, lf);
}

RadialField radial_bilaplacian(const RadialGrid& g, const RadialField& f) {
  return radial_laplacian(g, radial_laplacian(g, f));
}

double radial_dot(const RadialGrid& g, std::span<const double> f, std::span<const double> h) {
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * h[i];
  return s;
}

double tail_fraction(const RadialGrid& g, std::span<const double> f) {
  double peak = 0.0, tail = 0.0;
  const auto& r = g.nodes();
  const double start = 0.9 * g.radius();
  for (std::size_t i = 0; i < f.size(); ++i) {
    peak = std::max(peak, std::abs(f[i]));
    if (r[i] >= start) tail = std::max(tail, std::abs(f[i]));
  }
  return peak > 0.0 ? tail / peak : 0.0;
}

double radial_integral(const RadialGrid& g, std::span<const double> f) {
  if (f.size() != static_cast<std::size_t>(g.size())) throw GridMismatch("radial_integral: length differs");
  constexpr double truncation_tol = 1e-8;
  const double tail = tail_fraction(g, f);
  if (tail > truncation_tol) {
    std::ostringstream os;
    os << "integrand has not decayed near R = " << g.radius() << " (tail fraction " << tail << ")";
    warn(os.str());
  }
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

RadialField rescale_field(const RadialField& f, double nu, double mu, RescaleReport* report,
                          double truncation_tol) {
  if (!(mu > 0.0)) throw ValidationError(ValidationKind::options, "rescale_field needs mu > 0");
  const auto& g = f.grid();
  const auto& r = g.nodes();
  RadialField out(f.grid_ptr(), f.components());
  double lost = 0.0, peak = 0.0;
  for (int j = 0; j < f.components(); ++j) {
    auto src = f[j];
    auto dst = out[j];
    for (std::size_t i = 0; i < r.size(); ++i) {
      peak = std::max(peak, std::abs(src[i]));
      if (mu < 1.0 && r[i] > mu * g.radius()) lost = std::max(lost, std::abs(src[i]));
      dst[i] = (mu == 1.0) ? nu * src[i] : nu * cubic_sample(src, g.spacing(), mu * r[i]);
    }
  }
  if (report) {
    report->truncated_fraction = peak > 0.0 ? lost / peak : 0.0;
    report->truncated = report->truncated_fraction > truncation_tol;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

// a S^2 + b = a (S - i c)(S + i c) with c = sqrt(b / a). Factoring the two tridiagonal
// pieces keeps the O(h^-2) conditioning of each instead of the O(h^-4) of S^2 + c^2.
struct RadialBiharmonicSolver::Factor {
  std::optional<ShiftedTridiagonal> shifted;
};

RadialBiharmonicSolver::RadialBiharmonicSolver(RadialGridPtr grid, double a, double b)
    : grid_(std::move(grid)), a_(a), b_(b) {
  if (!(a >= 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError(ValidationKind::options, "(a Delta^2 + b) needs a >= 0 and b > 0");
  }
  factor_ = std::make_unique<Factor>();
  if (a > 0.0) factor_->shifted.emplace(grid_->diag(), grid_->sym_offdiag(), std::sqrt(b / a));
}

RadialBiharmonicSolver::RadialBiharmonicSolver(RadialBiharmonicSolver&&) noexcept = default;
RadialBiharmonicSolver& RadialBiharmonicSolver::operator=(RadialBiharmonicSolver&&) noexcept = default;
RadialBiharmonicSolver::~RadialBiharmonicSolver() = default;

void RadialBiharmonicSolver::solve(std::span<const double> rhs, std::span<double> out) const {
  const auto& sw = grid_->sqrt_weights();
  const auto n = rhs.size();
  if (n != static_cast<std::size_t>(grid_->size()) || out.size() != n) {
    throw GridMismatch("biharmonic solve: length differs from grid");
  }
  if (!factor_->shifted) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / b_;
    return;
  }
  std::vector<std::complex<double>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = sw[i] * rhs[i];
  factor_->shifted->solve_in_place(z, false);
  factor_->shifted->solve_in_place(z, true);
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i].real() / (a_ * sw[i]);
}

std::vector<double> RadialBiharmonicSolver::solve(std::span<const double> rhs) const {
  std::vector<double> out(rhs.size());
  solve(rhs, out);
  return out;
}

// ---------------------------------------------------------------------------------------------

PeriodicGrid::PeriodicGrid(int dims, int points_per_dim, double half_period)
    : dims_(dims), n_(points_per_dim), L_(half_period) {
  if (dims < 1) throw ValidationError(ValidationKind::dimension, "periodic box needs d >= 1");
  if (points_per_dim < 2 || points_per_dim % 2 != 0) {
    throw ValidationError(ValidationKind::options, "points per dimension must be even and >= 2");
  }
  if (!(half_period > 0.0)) throw ValidationError(ValidationKind::options, "box half-period must be > 0");
  total_ = 1;
  for (int i = 0; i < dims; ++i) total_ *= static_cast<std::size_t>(n_);
  cell_volume_ = std::pow(spacing(), dims);
  k_.resize(static_cast<std::size_t>(n_));
  const double dk = std::numbers::pi / L_;
  for (int i = 0; i < n_; ++i) k_[static_cast<std::size_t>(i)] = dk * (i < n_ / 2 ? i : i - n_);
}

void PeriodicGrid::unflatten(std::size_t flat, std::span<int> index) const {
  for (int d = dims_ - 1; d >= 0; --d) {
    index[static_cast<std::size_t>(d)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
}

std::uint64_t PeriodicGrid::fingerprint() const noexcept {
  const int kind = 1;
  return fingerprint_of(kind, dims_, n_, L_);
}

std::vector<double> bilaplacian_symbol(const PeriodicGrid& g) {
  std::vector<double> sym(g.total_points());
  std::vector<int> idx(static_cast<std::size_t>(g.dims()));
  const auto& k = g.wavenumbers();
  for (std::size_t f = 0; f < sym.size(); ++f) {
    g.unflatten(f, idx);
    double k2 = 0.0;
    for (int i : idx) k2 += k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)];
    sym[f] = k2 * k2;
  }
  return sym;
}

double nyquist_fraction(const PeriodicGrid& g, std::span<const std::complex<double>> spectrum) {
  const int nyq = g.points_per_dim() / 2;
  std::vector<int> idx(static_cast<std::size_t>(g.dims()));
  double peak = 0.0, edge = 0.0;
  for (std::size_t f = 0; f < spectrum.size(); ++f) {
    const double a = std::abs(spectrum[f]);
    peak = std::max(peak, a);
    g.unflatten(f % g.total_points(), idx);
    if (std::any_of(idx.begin(), idx.end(), [nyq](int i) { return i == nyq; })) edge = std::max(edge, a);
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

ComplexField::ComplexField(PeriodicGridPtr grid, int components)
    : grid_(std::move(grid)), components_(components),
      values_(static_cast<std::size_t>(components) * grid_->total_points()) {}

ComplexField::ComplexField(PeriodicGridPtr grid, int components, std::vector<std::complex<double>> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(components) * grid_->total_points()) {
    throw GridMismatch("complex field payload does not match grid size");
  }
}

ComplexField ComplexField::sample(PeriodicGridPtr grid, int components,
                                  const std::function<std::complex<double>(int, std::span<const double>)>& fn) {
  ComplexField f(grid, components);
  std::vector<int> idx(static_cast<std::size_t>(grid->dims()));
  std::vector<double> x(idx.size());
  for (std::size_t p = 0; p < grid->total_points(); ++p) {
    grid->unflatten(p, idx);
    for (std::size_t d = 0; d < idx.size(); ++d) x[d] = grid->coordinate(idx[d]);
    for (int j = 0; j < components; ++j) f[j][p] = fn(j, x);
  }
  return f;
}

ComplexField& ComplexField::operator*=(std::complex<double> s) {
  for (auto& v : values_) v *= s;
  return *this;
}

bool ComplexField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexField rescale_field(const ComplexField& f, double nu, int mu) {
  if (mu < 1) throw ValidationError(ValidationKind::options, "periodic rescale needs an integer mu >= 1");
  const auto& g = f.grid();
  const int n = g.points_per_dim();
  const int half = n / 2;
  ComplexField out(f.grid_ptr(), f.components());
  std::vector<int> idx(static_cast<std::size_t>(g.dims()));
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.unflatten(p, idx);
    // x = (i - n/2) dx; mu x lands on index n/2 + mu (i - n/2) modulo n.
    std::size_t src = 0;
    for (int i : idx) {
      int s = ((half + mu * (i - half)) % n + n) % n;
      src = src * static_cast<std::size_t>(n) + static_cast<std::size_t>(s);
    }
    for (int j = 0; j < f.components(); ++j) out[j][p] = nu * f[j][src];
  }
  return out;
}

ComplexField transplant(const RadialField& profile, PeriodicGridPtr box) {
  if (profile.grid().dimension() != box->dims()) {
    throw GridMismatch("transplant: radial dimension " + std::to_string(profile.grid().dimension()) +
                       " differs from box dimension " + std::to_string(box->dims()));
  }
  const double h = profile.grid().spacing();
  const double R = profile.grid().radius();
  return ComplexField::sample(box, profile.components(), [&](int j, std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double r = std::sqrt(r2);
    return std::complex<double>(r >= R ? 0.0 : cubic_sample(profile[j], h, r), 0.0);
  });
}

}  // namespace bcnls
