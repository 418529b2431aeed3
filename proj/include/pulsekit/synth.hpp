// Synthetic clip generator: pulse trains with known timing, band, and SNR
// placed in configurable noise. The ground truth it returns is the oracle the
// evaluation harness measures the detector against.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsekit/audio_io.hpp"

namespace pulsekit {

enum class NoiseKind { white, pink };

struct TrainSpec {
  double start_s = 0.0;
  double pulse_rate_hz = 3.3;
  int n_pulses = 40;
  double pulse_dur_s = 0.045;
  double band_lo_hz = 100.0;
  double band_hi_hz = 300.0;
  double snr_db = 15.0;          // in-band pulse Leq over in-band noise Leq
  double rate_jitter_pct = 5.0;  // uniform timing jitter, percent of period
  std::string label = "minke";
};

struct ToneSpec {
  double freq_hz = 120.0;
  double level_db = -20.0;  // tone Leq in dB
};

struct SynthSpec {
  int sample_rate = 2000;
  double duration_s = 30.0;
  std::vector<TrainSpec> trains;
  NoiseKind noise_kind = NoiseKind::white;
  double noise_variance = 1e-4;
  std::vector<ToneSpec> narrowband_tones;
  std::uint64_t seed = 0;
  // band the SNR is defined in (what the detector sees)
  double analysis_band_lo_hz = 75.0;
  double analysis_band_hi_hz = 350.0;
};

struct TruthEntry {
  double start_s = 0.0;  // first pulse onset
  double end_s = 0.0;    // last pulse offset
  std::string label;
  std::string source;  // optional recording name (multi-file truth files)
  std::vector<double> pulse_times;  // pulse centers, seconds
};

struct GroundTruth {
  std::vector<TruthEntry> intervals;
};

struct ClipResult {
  AudioStream stream;
  GroundTruth truth;
  bool gain_reduced = false;  // set when clipping forced a global scale-down
  double gain = 1.0;
};

// Deterministic given spec.seed. Pulses are band-passed white-noise bursts
// with 5 ms raised-cosine edges; each train's pulse amplitude is scaled so
// its in-band Leq sits snr_db above the in-band noise Leq. Samples are
// rounded to float32 precision so a float WAV round-trip is bit-exact.
ClipResult generate_clip(const SynthSpec& spec);

// Single-train clip with parameters drawn from the minke song ranges
// (2.8-4.5 pulses/s, 40-60 ms pulses, band within 100-300 Hz).
SynthSpec make_minke_preset(std::uint64_t seed, double snr_db = 15.0);

// Detector-passing non-minke clip: narrowband sloppy trains plus tonal
// clutter, for building labeled negative examples.
SynthSpec make_distractor_preset(std::uint64_t seed);

void write_truth_csv(const GroundTruth& truth, const std::string& path);
std::vector<TruthEntry> read_truth_csv(const std::string& path);

}  // namespace pulsekit
