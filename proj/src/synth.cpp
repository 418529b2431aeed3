#include "pulsekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsekit/csv.hpp"
#include "pulsekit/dsp.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit/features.hpp"
#include "pulsekit/kernels.hpp"
#include "pulsekit/rng.hpp"

namespace pulsekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kShapingTaps = 151;
constexpr double kShapingAttDb = 50.0;
constexpr double kEdgeS = 0.005;  // raised-cosine edge duration

double train_span_s(const TrainSpec& t) {
  const double period = 1.0 / t.pulse_rate_hz;
  const double jitter = t.rate_jitter_pct / 100.0 * period;
  return (t.n_pulses - 1) * period + 2.0 * jitter + t.pulse_dur_s;
}

void validate(const SynthSpec& spec) {
  if (spec.sample_rate <= 0 || spec.duration_s <= 0.0) {
    throw data_error("synth: bad sample rate or duration");
  }
  if (spec.noise_variance < 0.0) {
    throw data_error("synth: noise variance must be >= 0");
  }
  std::vector<std::pair<double, double>> spans;
  for (const auto& t : spec.trains) {
    if (!(t.pulse_rate_hz > 0.0) ||
        t.pulse_rate_hz >= spec.sample_rate / 2.0) {
      throw data_error("synth: pulse rate out of range");
    }
    if (t.n_pulses < 1 || t.pulse_dur_s <= 0.0) {
      throw data_error("synth: bad pulse count or duration");
    }
    if (!(t.band_lo_hz > 0.0) || !(t.band_lo_hz < t.band_hi_hz) ||
        t.band_hi_hz >= spec.sample_rate / 2.0) {
      throw data_error("synth: train band out of range");
    }
    if (!std::isfinite(t.snr_db)) throw data_error("synth: bad snr");
    if (t.start_s < 0.0 || t.start_s + train_span_s(t) > spec.duration_s) {
      throw data_error("synth: train does not fit within the clip");
    }
    spans.emplace_back(t.start_s, t.start_s + train_span_s(t));
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) {
      throw data_error("overlapping-trains");
    }
  }
}

std::vector<double> make_noise(const SynthSpec& spec, RngEngine& rng,
                               std::size_t n) {
  std::vector<double> noise(n);
  const double sigma = std::sqrt(spec.noise_variance);
  if (spec.noise_kind == NoiseKind::white) {
    for (double& v : noise) v = sigma * gaussian(rng);
    return noise;
  }
  // pink: three-stage one-pole approximation driven by white noise, then
  // rescaled to the requested variance
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (double& v : noise) {
    const double w = gaussian(rng);
    b0 = 0.99765 * b0 + 0.0990460 * w;
    b1 = 0.96300 * b1 + 0.2965164 * w;
    b2 = 0.57000 * b2 + 1.0526913 * w;
    v = b0 + b1 + b2 + 0.1848 * w;
  }
  if (sigma > 0.0 && n > 1) {
    const double mean = kernels::sum(noise.data(), n) / static_cast<double>(n);
    const double var =
        kernels::sum_squared_diff(noise.data(), n, mean) /
        static_cast<double>(n);
    const double scale = var > 0.0 ? sigma / std::sqrt(var) : 0.0;
    for (double& v : noise) v = (v - mean) * scale;
  } else {
    std::fill(noise.begin(), noise.end(), 0.0);
  }
  return noise;
}

// Band-passed white-noise burst with raised-cosine edges, unit RMS.
std::vector<double> make_pulse(RngEngine& rng, const TrainSpec& train,
                               int sample_rate,
                               const std::vector<double>& shaping_taps) {
  const auto len = static_cast<std::size_t>(
      std::lround(train.pulse_dur_s * sample_rate));
  if (len < 4) throw data_error("synth: pulse too short for sample rate");

  // draw extra samples so the 'valid' convolution region covers the burst
  std::vector<double> raw(len + shaping_taps.size());
  for (double& v : raw) v = gaussian(rng);
  std::vector<double> pulse(len);
  for (std::size_t i = 0; i < len; ++i) {
    pulse[i] = kernels::dot(shaping_taps.data(), raw.data() + i,
                            shaping_taps.size());
  }

  auto edge = static_cast<std::size_t>(std::lround(kEdgeS * sample_rate));
  edge = std::min(edge, len / 2);
  for (std::size_t i = 0; i < edge; ++i) {
    const double ramp =
        0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / edge);
    pulse[i] *= ramp;
    pulse[len - 1 - i] *= ramp;
  }

  const double ms =
      kernels::sum_squares(pulse.data(), len) / static_cast<double>(len);
  if (ms > 0.0) {
    const double inv_rms = 1.0 / std::sqrt(ms);
    for (double& v : pulse) v *= inv_rms;
  }
  return pulse;
}

}  // namespace

ClipResult generate_clip(const SynthSpec& spec) {
  validate(spec);
  RngEngine rng = seeded_engine(spec.seed, kSeedSaltSynth);
  const auto n = static_cast<std::size_t>(
      std::lround(spec.duration_s * spec.sample_rate));

  ClipResult result;
  result.stream.sample_rate = spec.sample_rate;
  result.stream.source_path = "synth";
  result.stream.samples = make_noise(spec, rng, n);
  auto& samples = result.stream.samples;

  // in-band noise level that the trains' SNR is defined against
  double noise_leq = -120.0;
  if (spec.noise_variance > 0.0 && !spec.trains.empty()) {
    const std::vector<double> band_taps = windowed_bandpass(
        spec.analysis_band_lo_hz, spec.analysis_band_hi_hz, spec.sample_rate,
        kShapingTaps, kShapingAttDb);
    const std::vector<double> in_band = filter_same(samples, band_taps);
    noise_leq = leq_db(in_band.data(), in_band.size());
  }

  for (const auto& train : spec.trains) {
    const std::vector<double> shaping_taps =
        windowed_bandpass(train.band_lo_hz, train.band_hi_hz,
                          spec.sample_rate, kShapingTaps, kShapingAttDb);
    // pulses are constructed at unit RMS, so the target RMS sets their Leq
    const double target_rms =
        spec.noise_variance > 0.0
            ? std::pow(10.0, (noise_leq + train.snr_db) / 20.0)
            : 0.1;
    const double period = 1.0 / train.pulse_rate_hz;
    const double jitter_s = train.rate_jitter_pct / 100.0 * period;

    TruthEntry entry;
    entry.label = train.label;
    for (int k = 0; k < train.n_pulses; ++k) {
      const double jitter = uniform_range(rng, -jitter_s, jitter_s);
      const double t0 = train.start_s + jitter_s + k * period + jitter;
      std::vector<double> pulse =
          make_pulse(rng, train, spec.sample_rate, shaping_taps);
      const auto i0 =
          static_cast<std::size_t>(std::lround(t0 * spec.sample_rate));
      if (i0 + pulse.size() > n) continue;  // guarded by validate; safety net
      kernels::axpy(target_rms, pulse.data(), samples.data() + i0,
                    pulse.size());
      const double onset = static_cast<double>(i0) / spec.sample_rate;
      const double offset =
          static_cast<double>(i0 + pulse.size()) / spec.sample_rate;
      if (entry.pulse_times.empty()) entry.start_s = onset;
      entry.end_s = offset;
      entry.pulse_times.push_back((onset + offset) / 2.0);
    }
    if (!entry.pulse_times.empty()) {
      result.truth.intervals.push_back(std::move(entry));
    }
  }

  for (const auto& tone : spec.narrowband_tones) {
    // level_db is the tone's Leq: amplitude = sqrt(2) * 10^(level/20)
    const double amp = std::sqrt(2.0) * std::pow(10.0, tone.level_db / 20.0);
    const double phase = uniform_range(rng, 0.0, 2.0 * kPi);
    const double w = 2.0 * kPi * tone.freq_hz / spec.sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] += amp * std::sin(w * static_cast<double>(i) + phase);
    }
  }

  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.99) {
    result.gain_reduced = true;
    result.gain = 0.99 / peak;
    for (double& v : samples) v *= result.gain;
  }

  // float32-exact samples make the float WAV round-trip bit-identical
  for (double& v : samples) v = static_cast<double>(static_cast<float>(v));

  std::sort(result.truth.intervals.begin(), result.truth.intervals.end(),
            [](const TruthEntry& a, const TruthEntry& b) {
              return a.start_s < b.start_s;
            });
  return result;
}

SynthSpec make_minke_preset(std::uint64_t seed, double snr_db) {
  RngEngine rng = seeded_engine(seed, kSeedSaltSynth ^ 0x70726573ULL);
  SynthSpec spec;
  spec.seed = seed;
  spec.noise_variance = 1e-4;

  TrainSpec train;
  train.pulse_rate_hz = uniform_range(rng, 2.8, 4.5);
  train.pulse_dur_s = uniform_range(rng, 0.040, 0.060);
  train.band_lo_hz = uniform_range(rng, 95.0, 120.0);
  train.band_hi_hz = uniform_range(rng, 270.0, 300.0);
  train.snr_db = snr_db;
  train.rate_jitter_pct = uniform_range(rng, 2.0, 8.0);
  const double span_target = uniform_range(rng, 16.0, 24.0);
  train.n_pulses =
      std::max(10, static_cast<int>(span_target * train.pulse_rate_hz));
  const double span = train_span_s(train);
  train.start_s = uniform_range(rng, 0.5, spec.duration_s - span - 0.5);
  train.label = "minke";
  spec.trains.push_back(train);
  return spec;
}

SynthSpec make_distractor_preset(std::uint64_t seed) {
  RngEngine rng = seeded_engine(seed, kSeedSaltSynth ^ 0x64697374ULL);
  SynthSpec spec;
  spec.seed = seed;
  spec.noise_variance = 1e-4;

  // narrowband sloppy train: passes the IPI rules but with a compressed
  // band, jittery spacing, and weaker level than a minke song
  TrainSpec train;
  train.pulse_rate_hz = uniform_range(rng, 2.9, 4.4);
  train.pulse_dur_s = uniform_range(rng, 0.025, 0.045);
  train.band_lo_hz = uniform_range(rng, 110.0, 150.0);
  train.band_hi_hz = train.band_lo_hz + uniform_range(rng, 45.0, 85.0);
  train.snr_db = uniform_range(rng, 9.0, 13.0);
  train.rate_jitter_pct = uniform_range(rng, 10.0, 16.0);
  const double span_target = uniform_range(rng, 12.0, 20.0);
  train.n_pulses =
      std::max(9, static_cast<int>(span_target * train.pulse_rate_hz));
  const double span = train_span_s(train);
  train.start_s = uniform_range(rng, 0.5, spec.duration_s - span - 0.5);
  train.label = "non-minke";
  spec.trains.push_back(train);

  // constant narrowband clutter in the low band
  ToneSpec tone;
  tone.freq_hz = uniform_range(rng, 80.0, 200.0);
  tone.level_db = uniform_range(rng, -38.0, -30.0);
  spec.narrowband_tones.push_back(tone);
  return spec;
}

void write_truth_csv(const GroundTruth& truth, const std::string& path) {
  CsvWriter w({"start_s", "end_s", "label", "n_pulses"});
  for (const auto& e : truth.intervals) {
    w.add_row({format_double(e.start_s), format_double(e.end_s), e.label,
               std::to_string(e.pulse_times.size())});
  }
  w.write_file(path);
}

std::vector<TruthEntry> read_truth_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int c_start = table.column("start_s");
  const int c_end = table.column("end_s");
  const int c_label = table.column("label");
  const int c_source = table.column("source");  // optional
  if (c_start < 0 || c_end < 0 || c_label < 0) {
    throw schema_error(path + ": truth CSV needs start_s,end_s,label columns");
  }
  std::vector<TruthEntry> truth;
  for (const auto& row : table.rows) {
    TruthEntry e;
    e.start_s = parse_double(row[c_start], path);
    e.end_s = parse_double(row[c_end], path);
    e.label = row[c_label];
    if (c_source >= 0) e.source = row[c_source];
    truth.push_back(std::move(e));
  }
  return truth;
}

}  // namespace pulsekit
