#pragma once

// Classic time-domain and cepstral pitch detectors, kept for comparison with
// the spectral-maximum tracker. They frame the raw signal themselves with
// BaselineConfig::frame_size and do not use the spectrogram.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "f0/audio_io.hpp"
#include "f0/dsp.hpp"
#include "f0/error.hpp"
#include "f0/fft.hpp"
#include "f0/track.hpp"
#include "f0/tracker.hpp"

namespace f0 {

/// Integer lag (or quefrency) search range for a band.
struct LagRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

inline LagRange lag_range(double sample_rate, double f_min, double f_max) {
  const auto lo = static_cast<std::size_t>(std::ceil(sample_rate / f_max));
  const auto hi = static_cast<std::size_t>(std::floor(sample_rate / f_min));
  if (lo < 2 || lo > hi) throw Error(Errc::empty_band, "no integer lag inside the band");
  return {lo, hi};
}

/// r(tau) / r(0) for tau in [0, max_lag], with r(tau) = sum_t x[t] x[t+tau]
/// over the overlapping part of the frame. All zeros for a silent frame.
inline std::vector<double> normalized_autocorrelation(std::span<const double> frame, std::size_t max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  const std::size_t n = frame.size();
  for (std::size_t tau = 0; tau <= max_lag && tau < n; ++tau) {
    double acc = 0.0;
    for (std::size_t t = 0; t + tau < n; ++t) acc += frame[t] * frame[t + tau];
    r[tau] = acc;
  }
  if (r[0] <= 0.0) return std::vector<double>(max_lag + 1, 0.0);
  const double r0 = r[0];
  for (auto& v : r) v /= r0;
  return r;
}

/// YIN cumulative-mean-normalized difference d'(tau) for tau in
/// [0, max_lag], integrating over the first `window` samples. d'(0) = 1, and
/// lags whose running sum is still zero are set to 1.
inline std::vector<double> yin_cmnd(std::span<const double> frame, std::size_t max_lag, std::size_t window) {
  if (window + max_lag > frame.size()) throw Error(Errc::invalid_config, "yin window exceeds frame");
  std::vector<double> d(max_lag + 1, 0.0);
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    double acc = 0.0;
    for (std::size_t t = 0; t < window; ++t) {
      const double diff = frame[t] - frame[t + tau];
      acc += diff * diff;
    }
    d[tau] = acc;
  }
  std::vector<double> out(max_lag + 1, 1.0);
  double running = 0.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    running += d[tau];
    out[tau] = running > 0.0 ? d[tau] * static_cast<double>(tau) / running : 1.0;
  }
  return out;
}

/// Real cepstrum of a Hann-windowed frame, zero-padded to the next power of
/// two: c = IDFT(log(|DFT(x w)| + eps)).
inline std::vector<double> real_cepstrum(std::span<const double> frame, double eps = 1e-12) {
  const std::size_t m = std::bit_ceil(std::max<std::size_t>(frame.size(), 2));
  const FftPlan plan(m);
  const auto window = make_window(WindowFunction::hann, frame.size());
  std::vector<std::complex<double>> buf(m);
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i] * window[i];
  plan.forward(buf);
  for (auto& v : buf) v = std::log(std::abs(v) + eps);
  plan.inverse(buf);
  std::vector<double> c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = buf[i].real();
  return c;
}

namespace detail {

template <class Estimator>
PitchTrack run_frames(const AudioClip& clip, const BaselineConfig& cfg, Method method, Estimator&& estimate) {
  const double fs = static_cast<double>(clip.sample_rate());
  cfg.validate(fs);
  const auto x = checked_mono(clip, cfg.frame_size);
  const std::size_t frames = frame_count(x.size(), cfg.frame_size, cfg.hop);
  const auto times = frame_centers(frames, cfg.frame_size, cfg.hop, clip.sample_rate());

  PitchTrack out;
  out.method = method;
  out.config = cfg;
  out.frames.resize(frames);
  std::vector<double> buf(cfg.frame_size);
  for (std::size_t j = 0; j < frames; ++j) {
    for (std::size_t i = 0; i < cfg.frame_size; ++i) buf[i] = x[j * cfg.hop + i];
    auto& rec = out.frames[j];
    rec.time = times[j];
    estimate(std::span<const double>(buf), rec);
    if (rec.f0) {
      rec.f0 = std::clamp(*rec.f0, cfg.f_min, cfg.f_max);
      rec.voiced = true;
    }
  }
  return out;
}

inline double parabolic_lag(std::span<const double> v, std::size_t i) {
  if (i == 0 || i + 1 >= v.size()) return static_cast<double>(i);
  return static_cast<double>(i) + refine_peak(v[i - 1], v[i], v[i + 1]);
}

}  // namespace detail

/// Autocorrelation detector. The highest normalized peak in the lag range
/// sets the voicing decision (>= 0.5); the reported lag is the first local
/// peak reaching 90% of that height, which suppresses subharmonic picks.
inline PitchTrack autocorr_pitch(const AudioClip& clip, const BaselineConfig& cfg) {
  const double fs = static_cast<double>(clip.sample_rate());
  const auto lags = lag_range(fs, cfg.f_min, cfg.f_max);
  return detail::run_frames(clip, cfg, Method::acf, [&](std::span<const double> frame, PitchFrame& rec) {
    const auto r = normalized_autocorrelation(frame, lags.hi + 1);
    double highest = -1.0;
    for (std::size_t tau = lags.lo; tau <= lags.hi; ++tau) {
      if (r[tau] > r[tau - 1] && r[tau] >= r[tau + 1]) highest = std::max(highest, r[tau]);
    }
    rec.peak_magnitude = std::max(highest, 0.0);
    if (highest < 0.5) return;
    for (std::size_t tau = lags.lo; tau <= lags.hi; ++tau) {
      if (r[tau] > r[tau - 1] && r[tau] >= r[tau + 1] && r[tau] >= 0.9 * highest) {
        rec.f0 = fs / detail::parabolic_lag(r, tau);
        return;
      }
    }
  });
}

/// YIN: first lag whose normalized difference dips under the threshold,
/// followed down to its local minimum and refined parabolically.
inline PitchTrack yin_pitch(const AudioClip& clip, const BaselineConfig& cfg) {
  const double fs = static_cast<double>(clip.sample_rate());
  const auto lags = lag_range(fs, cfg.f_min, cfg.f_max);
  const std::size_t max_lag = lags.hi + 1;
  return detail::run_frames(clip, cfg, Method::yin, [&](std::span<const double> frame, PitchFrame& rec) {
    const auto cmnd = yin_cmnd(frame, max_lag, frame.size() - max_lag);
    for (std::size_t tau = lags.lo; tau <= lags.hi; ++tau) {
      if (cmnd[tau] >= cfg.yin_threshold) continue;
      while (tau + 1 <= lags.hi && cmnd[tau + 1] < cmnd[tau]) ++tau;
      rec.peak_magnitude = 1.0 - cmnd[tau];
      rec.f0 = fs / detail::parabolic_lag(cmnd, tau);
      return;
    }
  });
}

/// Cepstral detector. Voiced when the strongest quefrency peak in range
/// exceeds 4x the median absolute cepstrum over the same range.
inline PitchTrack cepstrum_pitch(const AudioClip& clip, const BaselineConfig& cfg) {
  const double fs = static_cast<double>(clip.sample_rate());
  const auto lags = lag_range(fs, cfg.f_min, cfg.f_max);
  return detail::run_frames(clip, cfg, Method::cepstrum, [&](std::span<const double> frame, PitchFrame& rec) {
    if (std::all_of(frame.begin(), frame.end(), [](double s) { return s == 0.0; })) return;
    const auto c = real_cepstrum(frame);
    const std::size_t hi = std::min(lags.hi, c.size() / 2 - 1);
    if (hi < lags.lo) return;
    std::size_t best = lags.lo;
    std::vector<double> mags;
    mags.reserve(hi - lags.lo + 1);
    for (std::size_t q = lags.lo; q <= hi; ++q) {
      if (c[q] > c[best]) best = q;
      mags.push_back(std::abs(c[q]));
    }
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    const double median = *mid;
    rec.peak_magnitude = std::max(c[best], 0.0);
    if (!(c[best] > 4.0 * median)) return;
    rec.f0 = fs / detail::parabolic_lag(c, best);
  });
}

}  // namespace f0
