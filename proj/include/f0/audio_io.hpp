#pragma once

// WAV (RIFF) decoding and encoding plus the in-memory AudioClip.
//
// Supported on input: WAVE_FORMAT_PCM (16-bit) and WAVE_FORMAT_IEEE_FLOAT
// (32-bit), one or two channels. Unknown chunks are skipped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "f0/error.hpp"

namespace f0 {

/// Decoded audio, channel-major. Immutable after construction.
class AudioClip {
 public:
  AudioClip(std::vector<std::vector<float>> channels, std::uint32_t sample_rate)
      : channels_(std::move(channels)), sample_rate_(sample_rate) {
    if (sample_rate_ == 0) throw Error(Errc::invalid_config, "sample rate must be positive");
    if (channels_.empty()) throw Error(Errc::invalid_config, "clip needs at least one channel");
    const auto frames = channels_.front().size();
    for (const auto& ch : channels_) {
      if (ch.size() != frames) throw Error(Errc::invalid_config, "channel lengths differ");
      for (float s : ch) {
        if (!(s >= -1.0f && s <= 1.0f)) {
          throw Error(Errc::invalid_config, "sample outside [-1, 1]");
        }
      }
    }
  }

  static AudioClip mono(std::vector<float> samples, std::uint32_t sample_rate) {
    std::vector<std::vector<float>> ch;
    ch.push_back(std::move(samples));
    return AudioClip(std::move(ch), sample_rate);
  }

  std::uint32_t sample_rate() const noexcept { return sample_rate_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t frame_count() const noexcept { return channels_.front().size(); }
  double duration() const noexcept {
    return static_cast<double>(frame_count()) / static_cast<double>(sample_rate_);
  }
  bool is_mono() const noexcept { return channels_.size() == 1; }

  std::span<const float> channel(std::size_t index) const { return channels_.at(index); }
  /// Samples of a mono clip.
  std::span<const float> samples() const {
    if (!is_mono()) throw Error(Errc::non_mono_input, "clip has " + std::to_string(channel_count()) + " channels");
    return channels_.front();
  }

  friend bool operator==(const AudioClip&, const AudioClip&) = default;

 private:
  std::vector<std::vector<float>> channels_;
  std::uint32_t sample_rate_;
};

/// Unweighted mean over channels. Mono input comes back unchanged.
inline AudioClip downmix(const AudioClip& clip) {
  if (clip.is_mono()) return clip;
  const std::size_t n = clip.frame_count();
  const std::size_t nch = clip.channel_count();
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < nch; ++c) acc += clip.channel(c)[i];
    // the mean of values in [lo, hi] lies in [lo, hi]; clamp guards the
    // final rounding to float
    float lo = clip.channel(0)[i];
    float hi = lo;
    for (std::size_t c = 1; c < nch; ++c) {
      lo = std::min(lo, clip.channel(c)[i]);
      hi = std::max(hi, clip.channel(c)[i]);
    }
    out[i] = std::clamp(static_cast<float>(acc / static_cast<double>(nch)), lo, hi);
  }
  return AudioClip::mono(std::move(out), clip.sample_rate());
}

enum class SampleFormat { pcm16, float32 };

namespace detail {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

inline std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace detail

/// Decodes a complete RIFF/WAVE image held in memory.
inline AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  using detail::read_u16;
  using detail::read_u32;

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::malformed_header, "not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;

  std::size_t pos = 12;
  while (true) {
    if (pos + 8 > bytes.size()) throw Error(Errc::malformed_header, "no data chunk");
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::uint32_t size = read_u32(hdr + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw Error(Errc::malformed_header, "chunk '" + std::string(reinterpret_cast<const char*>(hdr), 4) +
                                              "' extends past end of file");
    }

    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16) throw Error(Errc::malformed_header, "fmt chunk too small");
      const std::uint8_t* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = read_u32(f + 4);
      block_align = read_u16(f + 12);
      bits = read_u16(f + 14);
      have_fmt = true;

      if (format != detail::kFormatPcm && format != detail::kFormatFloat) {
        throw Error(Errc::unsupported_encoding, "WAVE format code " + std::to_string(format));
      }
      if ((format == detail::kFormatPcm && bits != 16) || (format == detail::kFormatFloat && bits != 32)) {
        throw Error(Errc::unsupported_encoding, std::to_string(bits) + "-bit samples");
      }
      if (channels < 1 || channels > 2) {
        throw Error(Errc::unsupported_encoding, std::to_string(channels) + " channels");
      }
      if (sample_rate == 0) throw Error(Errc::malformed_header, "sample rate is zero");
      if (block_align != channels * (bits / 8)) throw Error(Errc::malformed_header, "inconsistent block align");
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) throw Error(Errc::malformed_header, "data chunk before fmt chunk");
      const std::size_t frames = size / block_align;
      if (frames == 0) throw Error(Errc::empty_audio, "data chunk holds no frames");

      std::vector<std::vector<float>> out(channels, std::vector<float>(frames));
      const std::uint8_t* d = bytes.data() + body;
      for (std::size_t i = 0; i < frames; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
          const std::uint8_t* s = d + i * block_align + c * (bits / 8);
          if (format == detail::kFormatPcm) {
            const auto code = static_cast<std::int16_t>(read_u16(s));
            out[c][i] = static_cast<float>(code) / 32768.0f;
          } else {
            const std::uint32_t raw = read_u32(s);
            float v;
            std::memcpy(&v, &raw, sizeof v);
            if (!std::isfinite(v)) throw Error(Errc::malformed_header, "non-finite float sample");
            out[c][i] = std::clamp(v, -1.0f, 1.0f);
          }
        }
      }
      return AudioClip(std::move(out), sample_rate);
    }

    pos = body + size + (size & 1u);
  }
}

inline AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

inline std::vector<std::uint8_t> encode_wav(const AudioClip& clip, SampleFormat format = SampleFormat::float32) {
  using namespace detail;
  const std::uint16_t channels = static_cast<std::uint16_t>(clip.channel_count());
  const std::uint16_t bits = format == SampleFormat::pcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.frame_count() * block_align);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == SampleFormat::pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, channels);
  put_u32(out, clip.sample_rate());
  put_u32(out, clip.sample_rate() * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);

  for (std::size_t i = 0; i < clip.frame_count(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const float v = clip.channel(c)[i];
      if (format == SampleFormat::pcm16) {
        const long code = std::clamp(std::lround(static_cast<double>(v) * 32768.0), -32768L, 32767L);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
      } else {
        std::uint32_t raw;
        std::memcpy(&raw, &v, sizeof raw);
        put_u32(out, raw);
      }
    }
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path, const AudioClip& clip,
                      SampleFormat format = SampleFormat::float32) {
  const auto bytes = encode_wav(clip, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_failure, "short write to " + path.string());
}

}  // namespace f0
