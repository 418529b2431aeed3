// PCM WAV decoding and slicing of continuous streams into fixed-duration
// overlapping analysis windows.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pulsekit {

// One channel of a decoded recording, normalized to [-1, 1].
struct AudioStream {
  std::vector<double> samples;
  int sample_rate = 0;
  int channel_index = 0;
  std::string source_path;
  std::optional<double> start_epoch;  // absolute time of sample 0, when known

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// A windowed chunk of the stream; zero-padded when the source tail is short.
struct SignalSlice {
  std::vector<double> samples;
  int sample_rate = 0;
  double start_time = 0.0;  // seconds from stream start
  double duration = 0.0;    // seconds

  double time_at(std::size_t index) const {
    return start_time + static_cast<double>(index) / sample_rate;
  }
};

// Decodes a RIFF/WAVE file holding integer PCM (8/16/24/32-bit) or 32-bit
// float samples and returns the requested channel. Errors: data_error with
// corrupt-header / unsupported-format / channel-out-of-range messages.
AudioStream open_audio(const std::string& path, int channel = 0);

enum class WavSampleFormat { pcm16, float32 };

// Writes a mono WAV file. float32 output is exact for streams whose samples
// are float32-representable (synth emits those), so write-then-read
// round-trips bit-identically.
void write_wav(const std::string& path, const AudioStream& stream,
               WavSampleFormat format = WavSampleFormat::float32);

// Cuts the stream into slices starting at 0, hop_s, 2*hop_s, ... A start
// offset t is emitted iff (duration - t) >= window_s/2; short tails are
// zero-padded to the full window.
std::vector<SignalSlice> slice_windows(const AudioStream& stream,
                                       double window_s, double hop_s);

}  // namespace pulsekit
