#include "bcnls/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace bcnls {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<std::complex<double>> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

struct SpectralTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

SpectralTransform::SpectralTransform(const PeriodicGrid& grid, int components)
    : components_(components), points_(grid.total_points()), plans_(std::make_unique<Plans>()) {
  if (components < 1) throw ValidationError(ValidationKind::components, "transform needs >= 1 component");
  std::vector<int> dims(static_cast<std::size_t>(grid.dims()), grid.points_per_dim());
  std::vector<std::complex<double>> scratch(points_ * static_cast<std::size_t>(components));
  auto* buf = as_fftw(scratch);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int dist = static_cast<int>(points_);
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_many_dft(grid.dims(), dims.data(), components, buf, nullptr, 1, dist, buf, nullptr, 1,
                                       dist, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_many_dft(grid.dims(), dims.data(), components, buf, nullptr, 1, dist, buf, nullptr,
                                        1, dist, FFTW_BACKWARD, flags);
  if (!plans_->forward || !plans_->backward) throw Error("FFTW planning failed");
}

SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;
SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::forward(std::span<std::complex<double>> data) const {
  if (data.size() != points_ * static_cast<std::size_t>(components_)) {
    throw GridMismatch("spectral transform: buffer length differs from plan");
  }
  fftw_execute_dft(plans_->forward, as_fftw(data), as_fftw(data));
}

void SpectralTransform::backward(std::span<std::complex<double>> data) const {
  if (data.size() != points_ * static_cast<std::size_t>(components_)) {
    throw GridMismatch("spectral transform: buffer length differs from plan");
  }
  fftw_execute_dft(plans_->backward, as_fftw(data), as_fftw(data));
  const double scale = 1.0 / static_cast<double>(points_);
  for (auto& v : data) v *= scale;
}

void apply_multiplier(const SpectralTransform& fft, std::span<const double> symbol, ComplexField& u) {
  if (symbol.size() != u.points()) throw GridMismatch("multiplier length differs from grid");
  fft.forward(u.values());
  for (int j = 0; j < u.components(); ++j) {
    auto c = u[j];
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol[i];
  }
  fft.backward(u.values());
}

ComplexField spectral_bilaplacian(const ComplexField& u) {
  SpectralTransform fft(u.grid(), u.components());
  ComplexField out = u;
  apply_multiplier(fft, bilaplacian_symbol(u.grid()), out);
  return out;
}

}  // namespace bcnls
