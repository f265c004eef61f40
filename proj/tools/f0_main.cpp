// f0 - batch fundamental-frequency tracking for WAV files.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "f0/f0.hpp"

namespace {

constexpr int kUsageError = 2;

int usage_error(const std::string& msg) {
  std::cerr << "f0: " << msg << "\n";
  return kUsageError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fundamental-frequency tracking for tonal sounds"};
  app.require_subcommand(1);

  f0::RunConfig cfg;
  std::vector<std::string> inputs;
  std::string method = "specmax";
  std::string window_fn = "hann";
  std::string out_path;
  std::string plot_path;
  bool dump_config = false;
  int verbose = 0;
  bool quiet = false;
  double f_min = cfg.tracker.f_min;
  double f_max = cfg.tracker.f_max;

  auto* track = app.add_subcommand("track", "Estimate f0 for each input file");
  track->add_option("inputs", inputs, "WAV files (16-bit PCM or 32-bit float)")->required();
  track->add_option("--method,-m", method, "specmax | acf | yin | cepstrum")
      ->check(CLI::IsMember({"specmax", "acf", "yin", "cepstrum"}));
  auto* fmin_opt = track->add_option("--fmin", f_min, "Lower band edge in Hz");
  auto* fmax_opt = track->add_option("--fmax", f_max, "Upper band edge in Hz");
  track->add_option("--window", cfg.spectrogram.window_size, "Spectrogram window in samples (power of two)");
  auto* overlap_opt =
      track->add_option("--overlap", cfg.spectrogram.overlap, "Samples shared by consecutive windows");
  track->add_option("--window-fn", window_fn, "hann | hamming | rectangular")
      ->check(CLI::IsMember({"hann", "hamming", "rectangular"}));
  auto* silence_opt = track->add_option("--silence-db", cfg.tracker.silence_threshold_db,
                                        "Envelope gate, dB below the loudest frame");
  auto* peak_opt =
      track->add_option("--peak-db", cfg.tracker.peak_threshold_db, "Peak gate, dB below the spectrogram maximum");
  auto* refine_opt = track->add_flag("--refine", cfg.tracker.refine_peak, "Parabolic sub-bin peak refinement");
  auto* frame_opt = track->add_option("--frame-size", cfg.baseline.frame_size, "Baseline frame in samples");
  auto* hop_opt = track->add_option("--hop", cfg.baseline.hop, "Baseline hop in samples");
  auto* yin_opt = track->add_option("--yin-threshold", cfg.baseline.yin_threshold, "YIN dip threshold");
  track->add_option("--out,-o", out_path, "Table path (directory when several inputs are given)");
  track->add_option("--plot", plot_path, "SVG plot path (directory when several inputs are given)");
  track->add_flag("--dump-config", dump_config, "Print the resolved configuration as JSON");
  track->add_flag("-v,--verbose", verbose, "More output");
  track->add_flag("-q,--quiet", quiet, "Only report errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  cfg.method = *f0::parse_method(method);
  cfg.spectrogram.window_function = window_fn == "hamming"       ? f0::WindowFunction::hamming
                                    : window_fn == "rectangular" ? f0::WindowFunction::rectangular
                                                                 : f0::WindowFunction::hann;
  if (overlap_opt->count() == 0) cfg.spectrogram.overlap = cfg.spectrogram.window_size / 2;
  cfg.tracker.f_min = cfg.baseline.f_min = f_min;
  cfg.tracker.f_max = cfg.baseline.f_max = f_max;
  for (const auto& in : inputs) cfg.inputs.emplace_back(in);
  if (!out_path.empty()) cfg.out = out_path;
  if (!plot_path.empty()) cfg.plot = plot_path;
  cfg.verbosity = quiet ? 0 : 1 + verbose;

  if (!(f_min >= 0.0 && f_min < f_max)) {
    return usage_error("--fmin (" + std::to_string(f_min) + ") must be below --fmax (" + std::to_string(f_max) + ")");
  }
  if ((fmin_opt->count() || fmax_opt->count()) && cfg.method != f0::Method::specmax && f_min <= 0.0) {
    return usage_error("--fmin must be positive for lag-based methods");
  }
  if (cfg.tracker.silence_threshold_db > 0.0 || cfg.tracker.peak_threshold_db > 0.0) {
    return usage_error("--silence-db and --peak-db must be <= 0");
  }
  try {
    cfg.spectrogram.validate();
  } catch (const f0::Error& e) {
    return usage_error(e.what());
  }

  const auto warn_ignored = [&](const CLI::Option* opt) {
    if (opt->count() > 0 && cfg.verbosity > 0) {
      std::cerr << "f0: warning: " << opt->get_name() << " has no effect with --method " << method << "\n";
    }
  };
  if (cfg.method == f0::Method::specmax) {
    for (const auto* o : {frame_opt, hop_opt, yin_opt}) warn_ignored(o);
  } else {
    for (const auto* o : {silence_opt, peak_opt, refine_opt}) warn_ignored(o);
    if (cfg.method != f0::Method::yin) warn_ignored(yin_opt);
  }

  if (dump_config) std::cout << f0::to_json(cfg).dump(2) << "\n";

  std::vector<f0::FileResult> results;
  try {
    results = f0::run(cfg);
  } catch (const f0::Error& e) {
    std::cerr << "f0: " << e.what() << "\n";
    return f0::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "f0: " << e.what() << "\n";
    return f0::exit_code(f0::Errc::io_failure);
  }

  int status = 0;
  for (const auto& r : results) {
    if (r.error) {
      std::cerr << "f0: " << r.input.string() << ": " << r.error->what() << "\n";
      if (status == 0) status = f0::exit_code(r.error->code());
      continue;
    }
    if (cfg.verbosity > 0) {
      const double pct = r.frames ? 100.0 * static_cast<double>(r.voiced) / static_cast<double>(r.frames) : 0.0;
      std::printf("%s: %zu frames, %.1f%% voiced, %.1f ms -> %s\n", r.input.string().c_str(), r.frames, pct,
                  r.elapsed_ms, r.outputs.table.string().c_str());
      if (cfg.verbosity > 1 && r.outputs.plot) std::printf("  plot: %s\n", r.outputs.plot->string().c_str());
    }
  }
  return status;
}
