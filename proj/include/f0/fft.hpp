#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "f0/error.hpp"

namespace f0 {

/// Iterative radix-2 FFT with precomputed twiddles and bit-reversal table.
/// A plan is immutable once built, so one instance can serve many threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size) : size_(size) {
    if (size < 2 || !std::has_single_bit(size)) {
      throw Error(Errc::invalid_config, "FFT size must be a power of two >= 2");
    }
    twiddles_.resize(size / 2);
    for (std::size_t k = 0; k < size / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
      twiddles_[k] = {std::cos(angle), std::sin(angle)};
    }
    const int bits = std::countr_zero(size);
    bitrev_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
  }

  std::size_t size() const noexcept { return size_; }

  /// In-place forward transform, X[k] = sum x[n] e^{-2 pi i k n / N}.
  void forward(std::span<std::complex<double>> data) const { transform(data, false); }

  /// In-place inverse transform including the 1/N factor.
  void inverse(std::span<std::complex<double>> data) const {
    transform(data, true);
    const double scale = 1.0 / static_cast<double>(size_);
    for (auto& v : data) v *= scale;
  }

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const {
    if (data.size() != size_) throw Error(Errc::invalid_config, "FFT buffer size mismatch");
    for (std::size_t i = 0; i < size_; ++i) {
      if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= size_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = size_ / len;
      for (std::size_t start = 0; start < size_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          auto w = twiddles_[j * stride];
          if (inverse) w = std::conj(w);
          const auto u = data[start + j];
          const auto t = w * data[start + j + half];
          data[start + j] = u + t;
          data[start + j + half] = u - t;
        }
      }
    }
  }

  std::size_t size_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bitrev_;
};

}  // namespace f0
