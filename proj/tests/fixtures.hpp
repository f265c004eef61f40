#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "f0/pipeline.hpp"
#include "f0/synth.hpp"

namespace f0::fixtures {

/// 0.3 s of 1 kHz, 0.1 s of silence, 0.3 s sweep 1 -> 2 kHz, noise-free.
inline SynthSpec golden_spec() {
  return SynthSpec::concat({SynthSpec::tone(1000.0, 0.3, 0.5), SynthSpec::silence(0.1),
                            SynthSpec::linear_chirp(1000.0, 2000.0, 0.3, 0.5)});
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("f0_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Writes the golden fixture as WAV, runs the default pipeline on it and
/// returns (table, svg) bytes.
inline std::pair<std::string, std::string> golden_outputs(const std::filesystem::path& dir) {
  const auto wav = dir / "golden.wav";
  write_wav(wav, synthesize(golden_spec(), 44100).clip);
  RunConfig cfg;
  cfg.inputs = {wav};
  cfg.out = dir / "golden.txt";
  cfg.plot = dir / "golden.svg";
  const auto res = process_file(cfg, wav);
  if (res.error) throw *res.error;
  return {slurp(*cfg.out), slurp(*cfg.plot)};
}

}  // namespace f0::fixtures
