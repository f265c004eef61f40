#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "f0/error.hpp"

namespace f0 {

enum class Method { specmax, acf, yin, cepstrum };

constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::specmax: return "specmax";
    case Method::acf: return "acf";
    case Method::yin: return "yin";
    case Method::cepstrum: return "cepstrum";
  }
  return "specmax";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::specmax, Method::acf, Method::yin, Method::cepstrum}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

/// Settings for the spectral-maximum tracker. Thresholds are dB relative to
/// per-clip maxima.
struct TrackerConfig {
  double f_min = 800.0;
  double f_max = 8000.0;
  double silence_threshold_db = -40.0;
  double peak_threshold_db = -45.0;
  bool refine_peak = false;

  void validate(double nyquist) const {
    if (!(f_min >= 0.0 && f_min < f_max)) {
      throw Error(Errc::invalid_config, "need 0 <= f_min < f_max");
    }
    if (f_max > nyquist) {
      throw Error(Errc::invalid_config, "f_max " + std::to_string(f_max) + " Hz exceeds Nyquist " +
                                            std::to_string(nyquist) + " Hz");
    }
    if (silence_threshold_db > 0.0 || peak_threshold_db > 0.0) {
      throw Error(Errc::invalid_config, "thresholds must be <= 0 dB");
    }
  }
};

/// Settings shared by the time-domain and cepstral baseline detectors.
struct BaselineConfig {
  std::size_t frame_size = 2048;
  std::size_t hop = 512;
  double f_min = 800.0;
  double f_max = 8000.0;
  double yin_threshold = 0.15;

  void validate(double sample_rate) const {
    if (!(f_min > 0.0 && f_min < f_max)) throw Error(Errc::invalid_config, "need 0 < f_min < f_max");
    if (f_max > sample_rate / 2.0) throw Error(Errc::invalid_config, "f_max exceeds Nyquist");
    if (hop == 0) throw Error(Errc::invalid_config, "hop must be positive");
    if (!(static_cast<double>(frame_size) > 2.0 * sample_rate / f_min)) {
      throw Error(Errc::invalid_config, "frame size " + std::to_string(frame_size) +
                                            " does not hold two periods of f_min");
    }
    if (!(yin_threshold > 0.0 && yin_threshold < 1.0)) {
      throw Error(Errc::invalid_config, "yin threshold must be in (0, 1)");
    }
  }
};

struct PitchFrame {
  double time = 0.0;
  std::optional<double> f0;
  double peak_magnitude = 0.0;
  bool voiced = false;
};

/// Per-frame pitch estimates. Unvoiced frames stay in the sequence so the
/// time grid is preserved.
struct PitchTrack {
  std::vector<PitchFrame> frames;
  Method method = Method::specmax;
  std::variant<TrackerConfig, BaselineConfig> config;

  std::size_t voiced_count() const noexcept {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.voiced ? 1 : 0;
    return n;
  }
  double voiced_fraction() const noexcept {
    return frames.empty() ? 0.0 : static_cast<double>(voiced_count()) / static_cast<double>(frames.size());
  }
};

/// Converts a dB value relative to a reference into a linear gate level.
inline double db_gate(double reference, double db) { return reference * std::pow(10.0, db / 20.0); }

}  // namespace f0
