#pragma once

// Spectral-maximum f0 tracker.
//
// For every spectrogram frame:
//   1. frames whose RMS envelope falls below the silence gate are unvoiced;
//   2. the strongest bin inside [f_min, f_max] is located (ties go to the
//      lowest frequency);
//   3. if that magnitude is below the peak gate the frame is unvoiced,
//      otherwise the bin frequency is reported (optionally refined).
// Both gates are relative to per-clip maxima, which makes the result
// invariant to input gain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "f0/dsp.hpp"
#include "f0/error.hpp"
#include "f0/track.hpp"

namespace f0 {

/// Parabolic vertex offset, in bins, through three equally spaced samples
/// around a local maximum. Clamped to [-0.5, 0.5]; a flat triple gives 0.
inline double refine_peak(double prev, double center, double next) {
  const double denom = prev - 2.0 * center + next;
  if (denom == 0.0 || !std::isfinite(denom)) return 0.0;
  const double delta = 0.5 * (prev - next) / denom;
  return std::clamp(delta, -0.5, 0.5);
}

/// Indices [first, last] of bins whose centre lies inside [f_min, f_max].
struct BandBins {
  std::size_t first = 0;
  std::size_t last = 0;
};

inline BandBins band_bins(const std::vector<double>& freqs, double f_min, double f_max) {
  const auto lo = std::lower_bound(freqs.begin(), freqs.end(), f_min);
  const auto hi = std::upper_bound(freqs.begin(), freqs.end(), f_max);
  if (lo >= hi) {
    throw Error(Errc::empty_band, "no frequency bins inside [" + std::to_string(f_min) + ", " +
                                      std::to_string(f_max) + "] Hz");
  }
  return {static_cast<std::size_t>(lo - freqs.begin()), static_cast<std::size_t>(hi - freqs.begin()) - 1};
}

inline PitchTrack track(const Spectrogram& spec, const Envelope& env, const TrackerConfig& cfg) {
  cfg.validate(static_cast<double>(spec.sample_rate()) / 2.0);
  if (env.values.size() != spec.frame_count() || env.frame_times != spec.frame_times()) {
    throw Error(Errc::frame_grid_mismatch, "envelope has " + std::to_string(env.values.size()) +
                                               " frames, spectrogram has " + std::to_string(spec.frame_count()));
  }
  const auto band = band_bins(spec.freq_bins(), cfg.f_min, cfg.f_max);

  const double silence_gate = db_gate(env.max_value(), cfg.silence_threshold_db);
  const double peak_gate = db_gate(spec.max_magnitude(), cfg.peak_threshold_db);
  const double bin_width = spec.bin_width();

  PitchTrack out;
  out.method = Method::specmax;
  out.config = cfg;
  out.frames.resize(spec.frame_count());

  for (std::size_t j = 0; j < spec.frame_count(); ++j) {
    auto& rec = out.frames[j];
    rec.time = spec.frame_times()[j];

    if (env.values[j] <= 0.0 || env.values[j] < silence_gate) continue;

    const auto mags = spec.frame(j);
    std::size_t best = band.first;
    for (std::size_t k = band.first + 1; k <= band.last; ++k) {
      if (mags[k] > mags[best]) best = k;
    }
    rec.peak_magnitude = mags[best];
    if (mags[best] <= 0.0 || mags[best] < peak_gate) continue;

    double f = spec.freq_bins()[best];
    if (cfg.refine_peak && best > 0 && best + 1 < mags.size() && mags[best - 1] <= mags[best] &&
        mags[best + 1] <= mags[best]) {
      const double delta = refine_peak(mags[best - 1], mags[best], mags[best + 1]);
      f = std::clamp((static_cast<double>(best) + delta) * bin_width, cfg.f_min, cfg.f_max);
    }
    rec.f0 = f;
    rec.voiced = true;
  }
  return out;
}

/// Convenience wrapper: spectrogram + envelope + track on a mono clip.
inline PitchTrack track_clip(const AudioClip& clip, const SpectrogramConfig& sc, const TrackerConfig& tc) {
  return track(spectrogram(clip, sc), envelope(clip, sc), tc);
}

}  // namespace f0
