#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pulsekit/audio_io.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/synth.hpp"

using namespace pulsekit;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

AudioStream tone_stream(int sample_rate, double duration_s) {
  AudioStream s;
  s.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(duration_s * sample_rate);
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.samples[i] = 0.5 * std::sin(2.0 * 3.14159265358979 * 50.0 *
                                  static_cast<double>(i) / sample_rate);
  }
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("audio_io");

TEST_CASE("16-bit mono wav: header arithmetic") {
  const std::string path = temp_path("pk_mono16.wav");
  write_wav(path, tone_stream(2000, 60.0), WavSampleFormat::pcm16);

  const AudioStream back = open_audio(path);
  CHECK(back.samples.size() == 120000);
  CHECK(back.sample_rate == 2000);
  CHECK(back.duration_s() == doctest::Approx(60.0));
  std::remove(path.c_str());
}

TEST_CASE("stereo: channel selection and bounds") {
  // hand-build a 2-channel 16-bit file where ch0 = 1000, ch1 = -2000
  const std::string path = temp_path("pk_stereo.wav");
  {
    std::ofstream out(path, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    const int frames = 100;
    out.write("RIFF", 4);
    u32(36 + frames * 4);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(1);      // pcm
    u16(2);      // stereo
    u32(2000);
    u32(2000 * 4);
    u16(4);
    u16(16);
    out.write("data", 4);
    u32(frames * 4);
    for (int i = 0; i < frames; ++i) {
      u16(static_cast<std::uint16_t>(1000));
      u16(static_cast<std::uint16_t>(-2000));
    }
  }

  const AudioStream ch0 = open_audio(path, 0);
  const AudioStream ch1 = open_audio(path, 1);
  CHECK(ch0.samples[0] == doctest::Approx(1000.0 / 32768.0));
  CHECK(ch1.samples[0] == doctest::Approx(-2000.0 / 32768.0));
  CHECK(ch1.channel_index == 1);
  CHECK_THROWS_WITH_AS(open_audio(path, 5),
                       doctest::Contains("channel-out-of-range"), Error);
  std::remove(path.c_str());
}

TEST_CASE("non-wav and truncated files are rejected") {
  const std::string path = temp_path("pk_bad.wav");
  {
    std::ofstream out(path, std::ios::binary);
    out << "definitely not a riff file";
  }
  CHECK_THROWS_WITH_AS(open_audio(path), doctest::Contains("corrupt-header"),
                       Error);
  std::remove(path.c_str());
}

TEST_CASE("synth clip round-trips bit-identically through float wav") {
  SynthSpec spec = make_minke_preset(42);
  const ClipResult clip = generate_clip(spec);

  const std::string path = temp_path("pk_roundtrip.wav");
  write_wav(path, clip.stream, WavSampleFormat::float32);
  const AudioStream back = open_audio(path);

  REQUIRE(back.samples.size() == clip.stream.samples.size());
  CHECK(back.samples == clip.stream.samples);  // bit-identical

  // decode is byte-stable: a second read is identical too
  const AudioStream again = open_audio(path);
  CHECK(again.samples == back.samples);
  std::remove(path.c_str());
}

TEST_CASE("slice_windows: 120 s stream at 30/15 gives 8 slices") {
  const AudioStream stream = tone_stream(2000, 120.0);
  const auto slices = slice_windows(stream, 30.0, 15.0);
  // offsets 0..105: 105 leaves 15 s, exactly half the window, still emitted
  REQUIRE(slices.size() == 8);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    CHECK(slices[k].start_time == doctest::Approx(15.0 * k));
    CHECK(slices[k].samples.size() == 60000);
    CHECK(slices[k].duration == doctest::Approx(30.0));
  }
  // the final slice is half padding
  const auto& tail = slices.back();
  for (std::size_t i = 30000; i < 60000; ++i) {
    CHECK(tail.samples[i] == 0.0);
  }
}

TEST_CASE("slice_windows: too-short stream gives no slices") {
  const AudioStream stream = tone_stream(2000, 10.0);
  CHECK(slice_windows(stream, 30.0, 15.0).empty());
}

TEST_CASE("slice_windows: 120 hours at hop 15 matches the slice census") {
  AudioStream stream;
  stream.sample_rate = 1;  // 1 Hz keeps the vector small
  stream.samples.assign(120 * 3600, 0.1);
  const auto slices = slice_windows(stream, 30.0, 15.0);
  CHECK(slices.size() == 28800);
}

TEST_CASE("slice_windows: hop == window partitions the input exactly") {
  RngEngine rng(5);
  AudioStream stream;
  stream.sample_rate = 100;
  stream.samples.resize(1000);
  for (double& v : stream.samples) v = uniform_range(rng, -1.0, 1.0);

  const auto slices = slice_windows(stream, 2.0, 2.0);
  REQUIRE(slices.size() == 5);
  std::vector<double> reassembled;
  for (const auto& s : slices) {
    reassembled.insert(reassembled.end(), s.samples.begin(), s.samples.end());
  }
  CHECK(reassembled == stream.samples);
}

TEST_CASE("slice_windows rejects empty streams and bad hops") {
  AudioStream empty;
  empty.sample_rate = 2000;
  CHECK_THROWS_WITH_AS(slice_windows(empty, 30.0, 15.0),
                       doctest::Contains("empty-stream"), Error);

  const AudioStream stream = tone_stream(2000, 60.0);
  CHECK_THROWS_AS(slice_windows(stream, 30.0, 31.0), Error);
  CHECK_THROWS_AS(slice_windows(stream, 30.0, 0.0), Error);
}

TEST_SUITE_END();
