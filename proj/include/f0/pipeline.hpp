#pragma once

// File-level driver: load -> downmix -> spectrogram + envelope -> selected
// method -> table (+ plot). Shared by the command-line tool and the tests.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "f0/audio_io.hpp"
#include "f0/baselines.hpp"
#include "f0/dsp.hpp"
#include "f0/error.hpp"
#include "f0/export.hpp"
#include "f0/track.hpp"
#include "f0/tracker.hpp"

namespace f0 {

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  Method method = Method::specmax;
  SpectrogramConfig spectrogram;
  TrackerConfig tracker;
  BaselineConfig baseline;
  /// Table file for a single input, directory when several inputs are given.
  std::optional<std::filesystem::path> out;
  /// SVG file for a single input, directory when several inputs are given.
  std::optional<std::filesystem::path> plot;
  int verbosity = 1;
};

struct FileOutputs {
  std::filesystem::path table;
  std::optional<std::filesystem::path> plot;
};

struct FileResult {
  std::filesystem::path input;
  FileOutputs outputs;
  std::size_t frames = 0;
  std::size_t voiced = 0;
  double elapsed_ms = 0.0;
  std::optional<Error> error;
};

/// Process exit status for each library error; 0 is success and 2 is a
/// command-line usage error.
constexpr int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_header: return 10;
    case Errc::unsupported_encoding: return 11;
    case Errc::empty_audio: return 12;
    case Errc::clip_too_short: return 13;
    case Errc::non_mono_input: return 14;
    case Errc::frame_grid_mismatch: return 15;
    case Errc::empty_band: return 16;
    case Errc::aliasing_violation: return 17;
    case Errc::amplitude_overflow: return 18;
    case Errc::io_failure: return 19;
    case Errc::invalid_config: return 20;
    case Errc::empty_track: return 21;
  }
  return 1;
}

inline nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(cfg.method));
  j["inputs"] = nlohmann::json::array();
  for (const auto& p : cfg.inputs) j["inputs"].push_back(p.string());
  j["out"] = cfg.out ? nlohmann::json(cfg.out->string()) : nlohmann::json(nullptr);
  j["plot"] = cfg.plot ? nlohmann::json(cfg.plot->string()) : nlohmann::json(nullptr);
  j["spectrogram"] = {{"window_size", cfg.spectrogram.window_size},
                      {"overlap", cfg.spectrogram.overlap},
                      {"hop", cfg.spectrogram.hop()},
                      {"window_function", std::string(to_string(cfg.spectrogram.window_function))}};
  j["tracker"] = {{"f_min", cfg.tracker.f_min},
                  {"f_max", cfg.tracker.f_max},
                  {"silence_threshold_db", cfg.tracker.silence_threshold_db},
                  {"peak_threshold_db", cfg.tracker.peak_threshold_db},
                  {"refine_peak", cfg.tracker.refine_peak}};
  j["baseline"] = {{"frame_size", cfg.baseline.frame_size},
                   {"hop", cfg.baseline.hop},
                   {"f_min", cfg.baseline.f_min},
                   {"f_max", cfg.baseline.f_max},
                   {"yin_threshold", cfg.baseline.yin_threshold}};
  return j;
}

/// Where the artifacts for `input` go. With several inputs, `out` and `plot`
/// name directories and files are called <stem>.txt / <stem>.svg.
inline FileOutputs resolve_outputs(const RunConfig& cfg, const std::filesystem::path& input) {
  FileOutputs o;
  const bool many = cfg.inputs.size() > 1;
  const auto stem = input.stem().string();
  if (!cfg.out) {
    o.table = input;
    o.table.replace_extension(".f0.txt");
  } else if (many) {
    o.table = *cfg.out / (stem + ".txt");
  } else {
    o.table = *cfg.out;
  }
  if (cfg.plot) o.plot = many ? *cfg.plot / (stem + ".svg") : *cfg.plot;
  return o;
}

/// Computes the track for an already loaded mono clip.
inline PitchTrack analyze(const AudioClip& mono, const RunConfig& cfg) {
  switch (cfg.method) {
    case Method::specmax: return track_clip(mono, cfg.spectrogram, cfg.tracker);
    case Method::acf: return autocorr_pitch(mono, cfg.baseline);
    case Method::yin: return yin_pitch(mono, cfg.baseline);
    case Method::cepstrum: return cepstrum_pitch(mono, cfg.baseline);
  }
  throw Error(Errc::invalid_config, "unknown method");
}

inline FileResult process_file(const RunConfig& cfg, const std::filesystem::path& input) {
  const auto start = std::chrono::steady_clock::now();
  FileResult res;
  res.input = input;
  res.outputs = resolve_outputs(cfg, input);
  try {
    const AudioClip clip = downmix(load_wav(input));
    const Spectrogram spec = spectrogram(clip, cfg.spectrogram);
    const Envelope env = envelope(clip, cfg.spectrogram);
    PitchTrack track = cfg.method == Method::specmax ? f0::track(spec, env, cfg.tracker) : analyze(clip, cfg);

    write_file_atomic(res.outputs.table, table_string(track));
    if (res.outputs.plot) render_plot(spec, track, env, *res.outputs.plot);
    res.frames = track.frames.size();
    res.voiced = track.voiced_count();
  } catch (const Error& e) {
    res.error = e;
  } catch (const std::exception& e) {
    res.error = Error(Errc::io_failure, e.what());
  }
  res.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// Worker count from F0_NUM_THREADS, else the hardware concurrency; never
/// more than the number of jobs.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("F0_NUM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) n = static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
    }
  }
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(jobs, 1));
}

/// Processes every input on a bounded worker pool. Results come back in
/// input order; one file failing does not affect the others.
inline std::vector<FileResult> run(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw Error(Errc::invalid_config, "no input files");
  if (cfg.inputs.size() > 1) {
    std::set<std::string> stems;
    for (const auto& p : cfg.inputs) {
      if (!stems.insert(p.stem().string()).second) {
        throw Error(Errc::invalid_config, "two inputs share the stem '" + p.stem().string() + "'");
      }
    }
    for (const auto& dir : {cfg.out, cfg.plot}) {
      if (dir) std::filesystem::create_directories(*dir);
    }
  }

  std::vector<FileResult> results(cfg.inputs.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = worker_count(cfg.inputs.size());
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cfg.inputs.size(); i = next++) {
          results[i] = process_file(cfg, cfg.inputs[i]);
        }
      });
    }
  }
  return results;
}

}  // namespace f0
