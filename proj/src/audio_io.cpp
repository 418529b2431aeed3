#include "pulsekit/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

double decode_sample(const std::uint8_t* p, const FmtChunk& fmt) {
  switch (fmt.bits_per_sample) {
    case 8:
      // 8-bit WAV is unsigned
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      const auto v = static_cast<std::int16_t>(read_u16(p));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0]) |
                       (static_cast<std::int32_t>(p[1]) << 8) |
                       (static_cast<std::int32_t>(p[2]) << 16);
      if (v & 0x800000) v |= ~0xffffff;  // sign extend
      return v / 8388608.0;
    }
    case 32: {
      const std::uint32_t raw = read_u32(p);
      if (fmt.format == kFormatIeeeFloat) {
        const float f = std::bit_cast<float>(raw);
        return std::clamp(static_cast<double>(f), -1.0, 1.0);
      }
      return static_cast<std::int32_t>(raw) / 2147483648.0;
    }
    default:
      throw data_error("unsupported-format: " +
                       std::to_string(fmt.bits_per_sample) +
                       "-bit samples");
  }
}

}  // namespace

AudioStream open_audio(const std::string& path, int channel) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open audio file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw data_error("corrupt-header: not a RIFF/WAVE file: " + path);
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const std::uint8_t* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const std::uint32_t chunk_size = read_u32(data + pos + 4);
    const std::uint8_t* body = data + pos + 8;
    if (pos + 8 + chunk_size > size) {
      throw data_error("corrupt-header: truncated chunk in " + path);
    }
    if (std::memcmp(data + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw data_error("corrupt-header: short fmt chunk");
      fmt.format = read_u16(body);
      fmt.channels = read_u16(body + 2);
      fmt.sample_rate = read_u32(body + 4);
      fmt.bits_per_sample = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(data + pos, "data", 4) == 0) {
      pcm = body;
      pcm_bytes = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || pcm == nullptr) {
    throw data_error("corrupt-header: missing fmt/data chunk in " + path);
  }
  if (fmt.format != kFormatPcm && fmt.format != kFormatIeeeFloat) {
    throw data_error("unsupported-format: compressed or extensible WAV (tag " +
                     std::to_string(fmt.format) + "): " + path);
  }
  if (fmt.format == kFormatIeeeFloat && fmt.bits_per_sample != 32) {
    throw data_error("unsupported-format: only 32-bit float WAV supported");
  }
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw data_error("corrupt-header: zero channels or sample rate");
  }
  if (channel < 0 || channel >= fmt.channels) {
    throw data_error("channel-out-of-range: requested " +
                     std::to_string(channel) + " of " +
                     std::to_string(fmt.channels));
  }

  const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t n_frames = pcm_bytes / frame_bytes;

  AudioStream stream;
  stream.sample_rate = static_cast<int>(fmt.sample_rate);
  stream.channel_index = channel;
  stream.source_path = path;
  stream.samples.resize(n_frames);
  const std::uint8_t* p = pcm + static_cast<std::size_t>(channel) *
                                    bytes_per_sample;
  for (std::size_t i = 0; i < n_frames; ++i, p += frame_bytes) {
    stream.samples[i] = decode_sample(p, fmt);
  }
  return stream;
}

void write_wav(const std::string& path, const AudioStream& stream,
               WavSampleFormat format) {
  const std::size_t n = stream.samples.size();
  const std::uint16_t bits = format == WavSampleFormat::pcm16 ? 16 : 32;
  const std::uint16_t tag =
      format == WavSampleFormat::pcm16 ? kFormatPcm : kFormatIeeeFloat;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * bits / 8);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(stream.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(stream.sample_rate) * bits / 8);
  put_u16(out, static_cast<std::uint16_t>(bits / 8));
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_bytes);

  if (format == WavSampleFormat::pcm16) {
    for (double s : stream.samples) {
      const double clamped = std::clamp(s, -1.0, 1.0);
      const auto v = static_cast<std::int16_t>(
          std::lrint(clamped * 32767.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    }
  } else {
    for (double s : stream.samples) {
      const float f = static_cast<float>(std::clamp(s, -1.0, 1.0));
      put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
  }

  std::ofstream fout(path, std::ios::binary);
  if (!fout) throw data_error("cannot write WAV file: " + path);
  fout << out;
}

std::vector<SignalSlice> slice_windows(const AudioStream& stream,
                                       double window_s, double hop_s) {
  if (stream.samples.empty()) throw data_error("empty-stream");
  if (!(hop_s > 0.0) || hop_s > window_s) {
    throw usage_error("slice hop must satisfy 0 < hop_s <= window_s");
  }
  const auto window_n =
      static_cast<std::size_t>(std::lround(window_s * stream.sample_rate));
  const auto hop_n =
      static_cast<std::size_t>(std::lround(hop_s * stream.sample_rate));
  const std::size_t len = stream.samples.size();

  std::vector<SignalSlice> slices;
  for (std::size_t k = 0;; ++k) {
    const std::size_t start = k * hop_n;
    if (start >= len) break;
    // emit iff at least half the window is covered by real samples
    const std::size_t remaining = len - start;
    if (static_cast<double>(remaining) < window_n / 2.0) break;
    SignalSlice slice;
    slice.sample_rate = stream.sample_rate;
    slice.start_time = static_cast<double>(start) / stream.sample_rate;
    slice.duration = static_cast<double>(window_n) / stream.sample_rate;
    slice.samples.assign(window_n, 0.0);
    const std::size_t copy_n = std::min(window_n, remaining);
    std::copy_n(stream.samples.begin() + static_cast<std::ptrdiff_t>(start),
                copy_n, slice.samples.begin());
    slices.push_back(std::move(slice));
  }
  return slices;
}

}  // namespace pulsekit
