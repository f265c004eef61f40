#include <cmath>
#include <cstring>
#include <numbers>

#include <gtest/gtest.h>

#include "f0/synth.hpp"

using f0::SynthSpec;

TEST(Synth, ToneDefinition) {
  const auto r = f0::synthesize(SynthSpec::tone(1000.0, 1.0, 1.0), 44100);
  ASSERT_EQ(r.clip.frame_count(), 44100u);
  for (std::size_t t = 0; t < 44100; t += 97) {
    EXPECT_NEAR(r.clip.samples()[t], std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(t) / 44100.0),
                1e-7);
  }
  EXPECT_EQ(*r.truth.at(0.5), 1000.0);
}

TEST(Synth, HarmonicStackMix) {
  const auto r = f0::synthesize(SynthSpec::harmonic_stack(1000.0, {0.3, 0.9}, 0.1, 0.8), 44100);
  for (std::size_t t = 0; t < r.clip.frame_count(); t += 13) {
    const double ph = 2.0 * std::numbers::pi * 1000.0 * static_cast<double>(t) / 44100.0;
    EXPECT_NEAR(r.clip.samples()[t], 0.8 * (0.3 * std::sin(ph) + 0.9 * std::sin(2.0 * ph)), 1e-6);
  }
  EXPECT_EQ(*r.truth.at(0.05), 1000.0);
}

TEST(Synth, ChirpInstantaneousFrequency) {
  const auto r = f0::synthesize(SynthSpec::linear_chirp(1000.0, 2000.0, 2.0), 44100);
  EXPECT_DOUBLE_EQ(*r.truth.at(1.0), 1500.0);
  EXPECT_DOUBLE_EQ(*r.truth.at(0.0), 1000.0);
  // phase is the closed-form integral; check one sample against it
  const double t = 1.5;
  const auto i = static_cast<std::size_t>(t * 44100.0);
  const double ti = static_cast<double>(i) / 44100.0;
  const double cycles = 1000.0 * ti + 0.25 * 1000.0 * ti * ti;
  EXPECT_NEAR(r.clip.samples()[i], std::sin(2.0 * std::numbers::pi * cycles), 1e-6);
}

TEST(Synth, ConcatAndSilenceTruth) {
  const auto r = f0::synthesize(
      SynthSpec::concat({SynthSpec::tone(900, 0.5), SynthSpec::silence(0.25), SynthSpec::tone(1800, 0.5)}), 8000);
  EXPECT_EQ(r.clip.frame_count(), 10000u);
  EXPECT_EQ(*r.truth.at(0.1), 900.0);
  EXPECT_FALSE(r.truth.at(0.6).has_value());
  EXPECT_EQ(*r.truth.at(1.0), 1800.0);
  EXPECT_FALSE(r.truth.at(1.26).has_value());
  for (std::size_t i = 4000; i < 6000; ++i) EXPECT_EQ(r.clip.samples()[i], 0.0f);
}

TEST(Synth, Errors) {
  try {
    f0::synthesize(SynthSpec::tone(30000.0, 0.1), 44100);
    FAIL();
  } catch (const f0::Error& e) {
    EXPECT_EQ(e.code(), f0::Errc::aliasing_violation);
  }
  try {
    f0::synthesize(SynthSpec::harmonic_stack(4000.0, {1, 1, 1, 1, 1, 1}, 0.1, 0.1), 44100);
    FAIL();
  } catch (const f0::Error& e) {
    EXPECT_EQ(e.code(), f0::Errc::aliasing_violation);
  }
  try {
    f0::synthesize(SynthSpec::harmonic_stack(1000.0, {0.3, 0.9}, 0.1, 1.0), 44100);
    FAIL();
  } catch (const f0::Error& e) {
    EXPECT_EQ(e.code(), f0::Errc::amplitude_overflow);
  }
}

TEST(SynthProperty, SameSeedSameBits) {
  for (std::uint64_t seed : {0u, 1u, 77u}) {
    auto spec = SynthSpec::linear_chirp(800, 3000, 0.3, 0.5);
    spec.with_noise(12.0, seed);
    const auto a = f0::synthesize(spec, 44100).clip;
    const auto b = f0::synthesize(spec, 44100).clip;
    ASSERT_EQ(std::memcmp(a.samples().data(), b.samples().data(), a.frame_count() * sizeof(float)), 0);
  }
}

TEST(SynthProperty, SnrWithinHalfDecibel) {
  for (double snr : {0.0, 10.0, 20.0, 35.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto clean = f0::synthesize(SynthSpec::tone(2000.0, 0.5, 0.2), 44100).clip;
      const auto noisy = f0::synthesize(SynthSpec::tone(2000.0, 0.5, 0.2).with_noise(snr, seed), 44100).clip;
      double ps = 0.0;
      double pn = 0.0;
      for (std::size_t i = 0; i < clean.frame_count(); ++i) {
        const double s = clean.samples()[i];
        const double n = static_cast<double>(noisy.samples()[i]) - s;
        ps += s * s;
        pn += n * n;
      }
      EXPECT_NEAR(10.0 * std::log10(ps / pn), snr, 0.5);
    }
  }
}
