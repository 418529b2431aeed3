#include <doctest.h>

#include <cmath>

#include "pulsekit/dsp.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit/features.hpp"
#include "pulsekit/synth.hpp"

using namespace pulsekit;

TEST_SUITE_BEGIN("synth");

TEST_CASE("zero trains give a pure noise clip with empty truth") {
  SynthSpec spec;
  spec.seed = 1;
  spec.noise_variance = 1e-4;
  const ClipResult clip = generate_clip(spec);
  CHECK(clip.truth.intervals.empty());
  CHECK(clip.stream.samples.size() == 60000);

  double ms = 0.0;
  for (double v : clip.stream.samples) ms += v * v;
  ms /= static_cast<double>(clip.stream.samples.size());
  CHECK(ms == doctest::Approx(1e-4).epsilon(0.1));
}

TEST_CASE("same seed produces byte-identical clips") {
  const SynthSpec spec = make_minke_preset(77);
  const ClipResult a = generate_clip(spec);
  const ClipResult b = generate_clip(spec);
  CHECK(a.stream.samples == b.stream.samples);

  SynthSpec other = make_minke_preset(77);
  other.seed = 78;
  const ClipResult c = generate_clip(other);
  CHECK(a.stream.samples != c.stream.samples);
}

TEST_CASE("truth matches the requested train layout") {
  SynthSpec spec;
  spec.seed = 5;
  spec.noise_variance = 1e-4;
  TrainSpec train;
  train.start_s = 4.0;
  train.pulse_rate_hz = 4.0;
  train.n_pulses = 50;
  train.pulse_dur_s = 0.05;
  train.rate_jitter_pct = 5.0;
  spec.trains.push_back(train);
  const ClipResult clip = generate_clip(spec);

  REQUIRE(clip.truth.intervals.size() == 1);
  const TruthEntry& entry = clip.truth.intervals[0];
  CHECK(entry.pulse_times.size() == 50);
  CHECK(entry.label == "minke");

  // inter-pulse spacing stays within the jitter bounds of the period
  const double period = 0.25;
  const double slack = 2.0 * 0.05 * period + 2.0 / 2000.0;  // jitter + rounding
  for (std::size_t i = 1; i < entry.pulse_times.size(); ++i) {
    const double gap = entry.pulse_times[i] - entry.pulse_times[i - 1];
    CHECK(gap >= period - slack);
    CHECK(gap <= period + slack);
  }
}

TEST_CASE("injected snr is measurable in the analysis band") {
  SynthSpec spec;
  spec.seed = 31;
  spec.noise_variance = 1e-4;
  TrainSpec train;
  train.start_s = 3.0;
  train.pulse_rate_hz = 3.3;
  train.n_pulses = 70;
  train.pulse_dur_s = 0.045;
  train.band_lo_hz = 100.0;
  train.band_hi_hz = 300.0;
  train.snr_db = 20.0;
  train.rate_jitter_pct = 0.0;
  spec.trains.push_back(train);
  const ClipResult clip = generate_clip(spec);

  // independent re-measurement: band-filter, then Leq over pulse extents vs
  // Leq over everything else
  const std::vector<double> taps = windowed_bandpass(75.0, 350.0, 2000, 151,
                                                     50.0);
  const std::vector<double> in_band =
      filter_same(clip.stream.samples, taps);

  const TruthEntry& entry = clip.truth.intervals[0];
  std::vector<double> pulse_samples;
  std::vector<double> noise_samples;
  std::vector<bool> in_pulse(in_band.size(), false);
  for (double t : entry.pulse_times) {
    const auto i0 = static_cast<std::size_t>((t - 0.0225) * 2000);
    const auto i1 = static_cast<std::size_t>((t + 0.0225) * 2000);
    for (std::size_t i = i0; i < i1 && i < in_band.size(); ++i) {
      in_pulse[i] = true;
    }
  }
  for (std::size_t i = 0; i < in_band.size(); ++i) {
    (in_pulse[i] ? pulse_samples : noise_samples).push_back(in_band[i]);
  }
  const double measured =
      leq_db(pulse_samples.data(), pulse_samples.size()) -
      leq_db(noise_samples.data(), noise_samples.size());
  CHECK(std::abs(measured - 20.0) <= 1.0);
}

TEST_CASE("pink noise hits the requested variance") {
  SynthSpec spec;
  spec.seed = 2;
  spec.noise_kind = NoiseKind::pink;
  spec.noise_variance = 4e-4;
  const ClipResult clip = generate_clip(spec);

  double mean = 0.0;
  for (double v : clip.stream.samples) mean += v;
  mean /= static_cast<double>(clip.stream.samples.size());
  double var = 0.0;
  for (double v : clip.stream.samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(clip.stream.samples.size());
  CHECK(var == doctest::Approx(4e-4).epsilon(0.02));
}

TEST_CASE("narrowband tones carry their stated level") {
  SynthSpec spec;
  spec.seed = 3;
  spec.noise_variance = 0.0;
  spec.narrowband_tones.push_back({150.0, -20.0});
  const ClipResult clip = generate_clip(spec);
  const double leq =
      leq_db(clip.stream.samples.data(), clip.stream.samples.size());
  CHECK(leq == doctest::Approx(-20.0).epsilon(0.01));
}

TEST_CASE("overlapping trains are rejected") {
  SynthSpec spec;
  spec.noise_variance = 1e-4;
  TrainSpec a;
  a.start_s = 2.0;
  a.n_pulses = 40;
  TrainSpec b = a;
  b.start_s = 5.0;
  spec.trains = {a, b};
  CHECK_THROWS_WITH_AS(generate_clip(spec),
                       doctest::Contains("overlapping-trains"), Error);
}

TEST_CASE("trains that spill past the clip are rejected") {
  SynthSpec spec;
  spec.noise_variance = 1e-4;
  TrainSpec t;
  t.start_s = 25.0;
  t.n_pulses = 100;  // 30+ seconds of pulses in a 30 s clip
  spec.trains = {t};
  CHECK_THROWS_AS(generate_clip(spec), Error);
}

TEST_CASE("clipping forces a flagged global gain reduction") {
  SynthSpec spec;
  spec.seed = 9;
  spec.noise_variance = 0.5;  // sigma ~0.7, gaussian tails clip
  const ClipResult clip = generate_clip(spec);
  CHECK(clip.gain_reduced);
  CHECK(clip.gain < 1.0);
  for (double v : clip.stream.samples) {
    // scaled to 0.99 peak, then rounded to float32 (ulp ~6e-8 at 1.0)
    CHECK(std::abs(v) <= 0.99 + 1e-6);
  }
}

TEST_CASE("preset clips carry the advertised structure") {
  const SynthSpec minke = make_minke_preset(11);
  REQUIRE(minke.trains.size() == 1);
  CHECK(minke.trains[0].label == "minke");
  CHECK(minke.trains[0].pulse_rate_hz >= 2.8);
  CHECK(minke.trains[0].pulse_rate_hz <= 4.5);
  CHECK(minke.trains[0].pulse_dur_s >= 0.040);
  CHECK(minke.trains[0].pulse_dur_s <= 0.060);

  const SynthSpec distractor = make_distractor_preset(11);
  REQUIRE(distractor.trains.size() == 1);
  CHECK(distractor.trains[0].label == "non-minke");
  CHECK_FALSE(distractor.narrowband_tones.empty());
}

TEST_SUITE_END();
