#pragma once

#include <complex>
#include <memory>
#include <span>

#include "bcnls/grid.hpp"

namespace bcnls {

/// In-place multidimensional FFT over `components` contiguous blocks of a PeriodicGrid.
/// The forward transform is unnormalized; backward divides by the point count, so
/// backward(forward(u)) = u. Execution is thread-safe; plan creation is serialized internally.
class SpectralTransform {
 public:
  SpectralTransform(const PeriodicGrid& grid, int components);
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;
  ~SpectralTransform();

  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

  int components() const noexcept { return components_; }
  std::size_t points() const noexcept { return points_; }

 private:
  struct Plans;
  int components_;
  std::size_t points_;
  std::unique_ptr<Plans> plans_;
};

/// Multiplies the transform of every component by `symbol` (flat, one entry per lattice point).
void apply_multiplier(const SpectralTransform& fft, std::span<const double> symbol, ComplexField& u);

/// Delta^2 u computed spectrally.
ComplexField spectral_bilaplacian(const ComplexField& u);

}  // namespace bcnls
