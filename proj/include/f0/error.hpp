#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace f0 {

enum class Errc {
  malformed_header,
  unsupported_encoding,
  empty_audio,
  clip_too_short,
  non_mono_input,
  frame_grid_mismatch,
  empty_band,
  aliasing_violation,
  amplitude_overflow,
  io_failure,
  invalid_config,
  empty_track,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::unsupported_encoding: return "UnsupportedEncoding";
    case Errc::empty_audio: return "EmptyAudio";
    case Errc::clip_too_short: return "ClipTooShort";
    case Errc::non_mono_input: return "NonMonoInput";
    case Errc::frame_grid_mismatch: return "FrameGridMismatch";
    case Errc::empty_band: return "EmptyBand";
    case Errc::aliasing_violation: return "AliasingViolation";
    case Errc::amplitude_overflow: return "AmplitudeOverflow";
    case Errc::io_failure: return "IoFailure";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::empty_track: return "EmptyTrack";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; code() tells
/// callers which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace f0
