#pragma once

// Thin wrapper over FFTW: cached in-place complex transforms of any rank.

#include <complex>
#include <span>
#include <vector>

namespace oulab::fft {

using Complex = std::complex<double>;

/// In-place unnormalized DFT with kernel e^{-2 pi i jk/M} along every axis.
void forward(std::span<Complex> data, const std::vector<int>& dims);

/// In-place unnormalized DFT with kernel e^{+2 pi i jk/M}.
void backward(std::span<Complex> data, const std::vector<int>& dims);

/// Cached plans for one shape, resolved once. Executing is thread-safe.
class Plan {
 public:
  explicit Plan(const std::vector<int>& dims);
  void forward(std::span<Complex> data) const;
  void backward(std::span<Complex> data) const;

 private:
  void* forward_;
  void* backward_;
};

}  // namespace oulab::fft
