#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "f0/audio_io.hpp"

namespace {

using f0::AudioClip;
using f0::Errc;

std::vector<std::uint8_t> pcm16_wav(std::uint16_t channels, std::uint32_t rate, const std::vector<std::int16_t>& codes) {
  std::vector<std::vector<float>> ch(channels, std::vector<float>(codes.size() / channels));
  for (std::size_t i = 0; i < codes.size(); ++i) ch[i % channels][i / channels] = static_cast<float>(codes[i]) / 32768.0f;
  return f0::encode_wav(AudioClip(ch, rate), f0::SampleFormat::pcm16);
}

Errc error_of(const std::vector<std::uint8_t>& bytes) {
  try {
    f0::decode_wav(bytes);
  } catch (const f0::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return Errc::io_failure;
}

void set_u16(std::vector<std::uint8_t>& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v & 0xff);
  b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

void set_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
}

}  // namespace

TEST(AudioIo, MonoPcm16HeaderArithmetic) {
  const auto clip = f0::decode_wav(pcm16_wav(1, 44100, std::vector<std::int16_t>(44100, 0)));
  EXPECT_EQ(clip.sample_rate(), 44100u);
  EXPECT_EQ(clip.channel_count(), 1u);
  EXPECT_EQ(clip.frame_count(), 44100u);
  EXPECT_DOUBLE_EQ(clip.duration(), 1.0);
}

TEST(AudioIo, Pcm16Scaling) {
  const auto clip = f0::decode_wav(pcm16_wav(1, 8000, {32767, -32768, 0, 16384}));
  EXPECT_FLOAT_EQ(clip.samples()[0], 32767.0f / 32768.0f);
  EXPECT_EQ(clip.samples()[1], -1.0f);
  EXPECT_EQ(clip.samples()[2], 0.0f);
  EXPECT_EQ(clip.samples()[3], 0.5f);
}

TEST(AudioIo, StereoIsDeinterleaved) {
  const auto clip = f0::decode_wav(pcm16_wav(2, 22050, {100, -100, 200, -200, 300, -300}));
  ASSERT_EQ(clip.channel_count(), 2u);
  ASSERT_EQ(clip.frame_count(), 3u);
  EXPECT_EQ(clip.channel(0)[2], 300.0f / 32768.0f);
  EXPECT_EQ(clip.channel(1)[2], -300.0f / 32768.0f);
}

TEST(AudioIo, DataChunkLongerThanFile) {
  auto bytes = pcm16_wav(1, 44100, std::vector<std::int16_t>(16, 1));
  set_u32(bytes, 40, 1000);
  EXPECT_EQ(error_of(bytes), Errc::malformed_header);
}

TEST(AudioIo, TruncatedFile) {
  auto bytes = pcm16_wav(1, 44100, std::vector<std::int16_t>(16, 1));
  bytes.resize(30);
  EXPECT_EQ(error_of(bytes), Errc::malformed_header);
}

TEST(AudioIo, NotRiff) {
  auto bytes = pcm16_wav(1, 44100, std::vector<std::int16_t>(16, 1));
  std::memcpy(bytes.data(), "RIFX", 4);
  EXPECT_EQ(error_of(bytes), Errc::malformed_header);
  std::memcpy(bytes.data(), "RIFF", 4);
  std::memcpy(bytes.data() + 8, "AVI ", 4);
  EXPECT_EQ(error_of(bytes), Errc::malformed_header);
}

TEST(AudioIo, RejectsCompressedAnd24Bit) {
  auto adpcm = pcm16_wav(1, 44100, std::vector<std::int16_t>(16, 1));
  set_u16(adpcm, 20, 2);
  EXPECT_EQ(error_of(adpcm), Errc::unsupported_encoding);

  auto extensible = pcm16_wav(1, 44100, std::vector<std::int16_t>(16, 1));
  set_u16(extensible, 20, 0xFFFE);
  EXPECT_EQ(error_of(extensible), Errc::unsupported_encoding);

  auto pcm24 = pcm16_wav(1, 44100, std::vector<std::int16_t>(16, 1));
  set_u16(pcm24, 32, 3);
  set_u16(pcm24, 34, 24);
  EXPECT_EQ(error_of(pcm24), Errc::unsupported_encoding);
}

TEST(AudioIo, EmptyDataChunk) {
  EXPECT_EQ(error_of(pcm16_wav(1, 44100, {})), Errc::empty_audio);
}

TEST(AudioIo, SkipsUnknownChunks) {
  auto bytes = pcm16_wav(1, 16000, {1000, 2000, 3000});
  // insert an odd-sized LIST chunk (padded to even) between fmt and data
  const std::vector<std::uint8_t> extra{'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, extra.begin(), extra.end());
  const auto clip = f0::decode_wav(bytes);
  ASSERT_EQ(clip.frame_count(), 3u);
  EXPECT_EQ(clip.samples()[2], 3000.0f / 32768.0f);
}

TEST(AudioIo, FloatPassThroughAndClamp) {
  auto bytes = f0::encode_wav(AudioClip::mono({0.25f, -0.75f, 1.0f}, 48000));
  // overwrite the last sample with 1.5
  const float big = 1.5f;
  std::memcpy(bytes.data() + 44 + 8, &big, 4);
  const auto clip = f0::decode_wav(bytes);
  EXPECT_EQ(clip.samples()[0], 0.25f);
  EXPECT_EQ(clip.samples()[1], -0.75f);
  EXPECT_EQ(clip.samples()[2], 1.0f);
}

TEST(AudioIo, MissingFileIsIoFailure) {
  try {
    f0::load_wav("/nonexistent/never.wav");
    FAIL();
  } catch (const f0::Error& e) {
    EXPECT_EQ(e.code(), Errc::io_failure);
  }
}

TEST(AudioIo, ClipRejectsOutOfRangeSamples) {
  EXPECT_THROW(AudioClip::mono({0.0f, 1.01f}, 44100), f0::Error);
  EXPECT_THROW(AudioClip({{0.0f}, {0.0f, 0.0f}}, 44100), f0::Error);
  EXPECT_THROW(AudioClip::mono({0.0f}, 0), f0::Error);
}

TEST(Downmix, MonoIsIdentity) {
  const auto clip = AudioClip::mono({0.1f, -0.2f, 0.3f}, 44100);
  EXPECT_EQ(f0::downmix(clip), clip);
}

TEST(Downmix, SymmetricStereoCancels) {
  const AudioClip clip({std::vector<float>(64, 0.5f), std::vector<float>(64, -0.5f)}, 44100);
  const auto mono = f0::downmix(clip);
  ASSERT_TRUE(mono.is_mono());
  for (float s : mono.samples()) EXPECT_EQ(s, 0.0f);
}

TEST(Downmix, Mean) {
  const AudioClip clip({{0.2f}, {0.6f}}, 44100);
  EXPECT_FLOAT_EQ(f0::downmix(clip).samples()[0], 0.4f);
  EXPECT_EQ(f0::downmix(clip).sample_rate(), 44100u);
}

TEST(AudioIoProperty, FloatRoundTripIsBitExact) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t channels = 1 + trial % 2;
    const std::size_t frames = 1 + rng() % 3000;
    std::vector<std::vector<float>> ch(channels, std::vector<float>(frames));
    for (auto& c : ch) {
      for (auto& s : c) s = u(rng);
    }
    ch[0][0] = -1.0f;
    const AudioClip clip(ch, 8000 + static_cast<std::uint32_t>(rng() % 40000));
    const auto path = std::filesystem::temp_directory_path() / ("f0_rt_" + std::to_string(trial) + ".wav");
    f0::write_wav(path, clip);
    const auto back = f0::load_wav(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.channel_count(), clip.channel_count());
    ASSERT_EQ(back.sample_rate(), clip.sample_rate());
    for (std::size_t c = 0; c < channels; ++c) {
      ASSERT_EQ(std::memcmp(back.channel(c).data(), clip.channel(c).data(), frames * sizeof(float)), 0);
    }
  }
}

TEST(DownmixProperty, IdempotentAndBounded) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t frames = 1 + rng() % 500;
    std::vector<std::vector<float>> ch(2, std::vector<float>(frames));
    for (auto& c : ch) {
      for (auto& s : c) s = u(rng);
    }
    const AudioClip clip(ch, 44100);
    const auto once = f0::downmix(clip);
    EXPECT_EQ(f0::downmix(once), once);
    for (std::size_t i = 0; i < frames; ++i) {
      EXPECT_GE(once.samples()[i], std::min(ch[0][i], ch[1][i]));
      EXPECT_LE(once.samples()[i], std::max(ch[0][i], ch[1][i]));
    }
  }
}
