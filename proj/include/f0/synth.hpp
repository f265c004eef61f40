#pragma once

// Deterministic test signals with known f0 trajectories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "f0/audio_io.hpp"
#include "f0/error.hpp"

namespace f0 {

struct SynthSpec {
  enum class Kind { tone, harmonic_stack, linear_chirp, silence, concat };

  Kind kind = Kind::tone;
  double f_start = 0.0;  // f0 for tones and stacks
  double f_end = 0.0;    // chirps only
  std::vector<double> harmonic_amplitudes{1.0};
  double duration = 0.0;
  double amplitude = 1.0;
  std::optional<double> noise_snr_db;
  std::uint64_t seed = 0;
  std::vector<SynthSpec> parts;

  static SynthSpec tone(double f0, double duration, double amplitude = 1.0) {
    SynthSpec s;
    s.kind = Kind::tone;
    s.f_start = s.f_end = f0;
    s.duration = duration;
    s.amplitude = amplitude;
    return s;
  }
  static SynthSpec harmonic_stack(double f0, std::vector<double> harmonics, double duration,
                                  double amplitude = 1.0) {
    SynthSpec s = tone(f0, duration, amplitude);
    s.kind = Kind::harmonic_stack;
    s.harmonic_amplitudes = std::move(harmonics);
    return s;
  }
  static SynthSpec linear_chirp(double f_start, double f_end, double duration, double amplitude = 1.0) {
    SynthSpec s = tone(f_start, duration, amplitude);
    s.kind = Kind::linear_chirp;
    s.f_end = f_end;
    return s;
  }
  static SynthSpec silence(double duration) {
    SynthSpec s;
    s.kind = Kind::silence;
    s.duration = duration;
    s.harmonic_amplitudes.clear();
    return s;
  }
  static SynthSpec concat(std::vector<SynthSpec> parts) {
    SynthSpec s;
    s.kind = Kind::concat;
    s.parts = std::move(parts);
    s.harmonic_amplitudes.clear();
    return s;
  }

  SynthSpec& with_noise(double snr_db, std::uint64_t noise_seed) {
    noise_snr_db = snr_db;
    seed = noise_seed;
    return *this;
  }
};

/// Piecewise-linear f0(t); silent spans have no entry.
class GroundTruth {
 public:
  struct Segment {
    double t_begin;
    double t_end;
    double f_begin;
    double f_end;
  };

  void add(Segment s) { segments_.push_back(s); }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  std::optional<double> at(double t) const {
    for (const auto& s : segments_) {
      if (t >= s.t_begin && t < s.t_end) {
        if (s.f_begin == s.f_end) return s.f_begin;
        return s.f_begin + (s.f_end - s.f_begin) * (t - s.t_begin) / (s.t_end - s.t_begin);
      }
    }
    return std::nullopt;
  }

 private:
  std::vector<Segment> segments_;
};

struct SynthResult {
  AudioClip clip;
  GroundTruth truth;
};

namespace detail {

inline void check_aliasing(const SynthSpec& spec, double fs) {
  const double top = std::max(spec.f_start, spec.f_end);
  for (std::size_t k = 0; k < spec.harmonic_amplitudes.size(); ++k) {
    if (spec.harmonic_amplitudes[k] == 0.0) continue;
    const double f = top * static_cast<double>(k + 1);
    if (f >= fs / 2.0) {
      throw Error(Errc::aliasing_violation, "partial at " + std::to_string(f) + " Hz is not below Nyquist " +
                                                std::to_string(fs / 2.0) + " Hz");
    }
  }
}

inline void render(const SynthSpec& spec, double fs, double t0, std::vector<double>& out, GroundTruth& truth) {
  const std::size_t begin = out.size();
  if (spec.kind == SynthSpec::Kind::concat) {
    for (const auto& part : spec.parts) {
      render(part, fs, static_cast<double>(out.size()) / fs, out, truth);
    }
  } else {
    if (!(spec.duration >= 0.0)) throw Error(Errc::invalid_config, "negative duration");
    for (double a : spec.harmonic_amplitudes) {
      if (!(a >= 0.0)) throw Error(Errc::invalid_config, "harmonic amplitudes must be nonnegative");
    }
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * fs));
    out.resize(begin + n, 0.0);
    if (spec.kind != SynthSpec::Kind::silence) {
      check_aliasing(spec, fs);
      const double sweep = spec.kind == SynthSpec::Kind::linear_chirp ? spec.f_end - spec.f_start : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        // closed-form integral of f(t) = f_start + sweep t / duration
        const double cycles = spec.f_start * t + (sweep != 0.0 ? 0.5 * sweep * t * t / spec.duration : 0.0);
        double v = 0.0;
        for (std::size_t k = 0; k < spec.harmonic_amplitudes.size(); ++k) {
          v += spec.harmonic_amplitudes[k] *
               std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) * cycles);
        }
        out[begin + i] = spec.amplitude * v;
      }
      const double t1 = t0 + static_cast<double>(n) / fs;
      if (n > 0) truth.add({t0, t1, spec.f_start, spec.f_end});
    }
  }

  if (spec.noise_snr_db) {
    const std::size_t n = out.size() - begin;
    double signal_power = 0.0;
    for (std::size_t i = begin; i < out.size(); ++i) signal_power += out[i] * out[i];
    if (n == 0 || signal_power == 0.0) throw Error(Errc::invalid_config, "cannot set SNR on a silent signal");
    signal_power /= static_cast<double>(n);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> noise(n);
    double noise_power = 0.0;
    for (auto& v : noise) {
      v = gauss(rng);
      noise_power += v * v;
    }
    noise_power /= static_cast<double>(n);
    const double target = signal_power / std::pow(10.0, *spec.noise_snr_db / 10.0);
    const double scale = std::sqrt(target / noise_power);
    for (std::size_t i = 0; i < n; ++i) out[begin + i] += scale * noise[i];
  }
}

}  // namespace detail

inline SynthResult synthesize(const SynthSpec& spec, std::uint32_t sample_rate) {
  if (sample_rate == 0) throw Error(Errc::invalid_config, "sample rate must be positive");
  std::vector<double> samples;
  GroundTruth truth;
  detail::render(spec, static_cast<double>(sample_rate), 0.0, samples, truth);
  if (samples.empty()) throw Error(Errc::empty_audio, "synthesized signal has no samples");

  std::vector<float> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::abs(samples[i]) > 1.0) {
      throw Error(Errc::amplitude_overflow, "peak " + std::to_string(std::abs(samples[i])) + " exceeds 1.0");
    }
    out[i] = static_cast<float>(samples[i]);
  }
  return {AudioClip::mono(std::move(out), sample_rate), std::move(truth)};
}

}  // namespace f0
