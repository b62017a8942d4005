#pragma once

#include <complex>
#include <memory>
#include <span>

namespace slidemimo {

/// Unnormalized M-point DFT backed by a cached FFTW plan.
///
/// forward: X[m] = sum_n x[n] exp(-j2pi mn/M)
/// inverse: x[n] = sum_m X[m] exp(+j2pi mn/M)
/// Callers apply 1/sqrt(M) for the unitary convention. Instances are cheap to
/// copy and safe to use from several threads at once.
class Dft {
 public:
  struct Plans;  // opaque FFTW plan pair

  explicit Dft(int size);

  int size() const { return size_; }

  void forward(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const;
  void inverse(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const;

 private:
  int size_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace slidemimo
