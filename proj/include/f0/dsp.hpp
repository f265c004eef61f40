#pragma once

// Short-time Fourier analysis: framing, windowing, magnitude spectrogram and
// the per-frame RMS envelope used for silence gating.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "f0/audio_io.hpp"
#include "f0/error.hpp"
#include "f0/fft.hpp"

namespace f0 {

enum class WindowFunction { hann, hamming, rectangular };

constexpr std::string_view to_string(WindowFunction w) noexcept {
  switch (w) {
    case WindowFunction::hann: return "hann";
    case WindowFunction::hamming: return "hamming";
    case WindowFunction::rectangular: return "rectangular";
  }
  return "hann";
}

struct SpectrogramConfig {
  std::size_t window_size = 1024;
  std::size_t overlap = 512;
  WindowFunction window_function = WindowFunction::hann;

  std::size_t hop() const noexcept { return window_size - overlap; }

  void validate() const {
    if (window_size < 16 || !std::has_single_bit(window_size)) {
      throw Error(Errc::invalid_config, "window size must be a power of two >= 16, got " + std::to_string(window_size));
    }
    if (overlap >= window_size) {
      throw Error(Errc::invalid_config, "overlap must be smaller than the window size");
    }
  }
};

/// Symmetric window of the given length (matches numpy.hanning / numpy.hamming).
inline std::vector<double> make_window(WindowFunction kind, std::size_t size) {
  std::vector<double> w(size, 1.0);
  if (kind == WindowFunction::rectangular || size < 2) return w;
  const double denom = static_cast<double>(size - 1);
  for (std::size_t n = 0; n < size; ++n) {
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
    w[n] = kind == WindowFunction::hann ? 0.5 - 0.5 * c : 0.54 - 0.46 * c;
  }
  return w;
}

/// Number of complete frames; a trailing partial frame is dropped.
inline std::size_t frame_count(std::size_t samples, std::size_t frame_size, std::size_t hop) {
  if (samples < frame_size) return 0;
  return (samples - frame_size) / hop + 1;
}

/// Magnitude matrix over (frequency bin x frame). Storage is frame-major so
/// one frame's spectrum is contiguous.
class Spectrogram {
 public:
  Spectrogram(std::vector<double> magnitudes, std::vector<double> freq_bins, std::vector<double> frame_times,
              std::uint32_t sample_rate)
      : magnitudes_(std::move(magnitudes)),
        freq_bins_(std::move(freq_bins)),
        frame_times_(std::move(frame_times)),
        sample_rate_(sample_rate) {}

  std::size_t bin_count() const noexcept { return freq_bins_.size(); }
  std::size_t frame_count() const noexcept { return frame_times_.size(); }
  std::uint32_t sample_rate() const noexcept { return sample_rate_; }
  const std::vector<double>& freq_bins() const noexcept { return freq_bins_; }
  const std::vector<double>& frame_times() const noexcept { return frame_times_; }
  /// Bin spacing in Hz.
  double bin_width() const noexcept { return freq_bins_.size() > 1 ? freq_bins_[1] : 0.0; }

  double at(std::size_t bin, std::size_t frame) const { return magnitudes_[frame * bin_count() + bin]; }
  std::span<const double> frame(std::size_t j) const {
    return std::span<const double>(magnitudes_).subspan(j * bin_count(), bin_count());
  }
  double max_magnitude() const noexcept {
    double m = 0.0;
    for (double v : magnitudes_) m = std::max(m, v);
    return m;
  }

 private:
  std::vector<double> magnitudes_;
  std::vector<double> freq_bins_;
  std::vector<double> frame_times_;
  std::uint32_t sample_rate_;
};

struct Envelope {
  std::vector<double> values;
  std::vector<double> frame_times;

  double max_value() const noexcept {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
};

namespace detail {

inline std::vector<double> frame_centers(std::size_t frames, std::size_t frame_size, std::size_t hop,
                                         std::uint32_t fs) {
  std::vector<double> t(frames);
  for (std::size_t j = 0; j < frames; ++j) {
    t[j] = static_cast<double>(j * hop + frame_size / 2) / static_cast<double>(fs);
  }
  return t;
}

inline std::span<const float> checked_mono(const AudioClip& clip, std::size_t window_size) {
  const auto x = clip.samples();
  if (x.size() < window_size) {
    throw Error(Errc::clip_too_short, std::to_string(x.size()) + " samples, need at least " +
                                          std::to_string(window_size));
  }
  return x;
}

}  // namespace detail

/// One-sided |DFT| of each windowed frame. No log scaling and no
/// normalization by the window sum.
inline Spectrogram spectrogram(const AudioClip& clip, const SpectrogramConfig& config) {
  config.validate();
  const auto x = detail::checked_mono(clip, config.window_size);
  const std::size_t n = config.window_size;
  const std::size_t hop = config.hop();
  const std::size_t frames = frame_count(x.size(), n, hop);
  const std::size_t bins = n / 2 + 1;
  const std::uint32_t fs = clip.sample_rate();

  const FftPlan plan(n);
  const auto window = make_window(config.window_function, n);
  std::vector<std::complex<double>> buf(n);
  std::vector<double> mags(frames * bins);

  for (std::size_t j = 0; j < frames; ++j) {
    const std::size_t start = j * hop;
    for (std::size_t i = 0; i < n; ++i) buf[i] = {static_cast<double>(x[start + i]) * window[i], 0.0};
    plan.forward(buf);
    for (std::size_t k = 0; k < bins; ++k) mags[j * bins + k] = std::abs(buf[k]);
  }

  std::vector<double> freqs(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    freqs[k] = static_cast<double>(k) * static_cast<double>(fs) / static_cast<double>(n);
  }
  return Spectrogram(std::move(mags), std::move(freqs), detail::frame_centers(frames, n, hop, fs), fs);
}

/// RMS of the unwindowed samples of each frame, on the spectrogram's grid.
inline Envelope envelope(const AudioClip& clip, const SpectrogramConfig& config) {
  config.validate();
  const auto x = detail::checked_mono(clip, config.window_size);
  const std::size_t n = config.window_size;
  const std::size_t hop = config.hop();
  const std::size_t frames = frame_count(x.size(), n, hop);

  Envelope env;
  env.values.resize(frames);
  for (std::size_t j = 0; j < frames; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = x[j * hop + i];
      acc += s * s;
    }
    env.values[j] = std::sqrt(acc / static_cast<double>(n));
  }
  env.frame_times = detail::frame_centers(frames, n, hop, clip.sample_rate());
  return env;
}

}  // namespace f0
