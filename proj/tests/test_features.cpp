#include <doctest.h>

#include <cmath>

#include "pulsekit/detector.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit/features.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/synth.hpp"

using namespace pulsekit;

namespace {

constexpr int kRate = 2000;

SignalSlice noise_slice(RngEngine& rng, double sigma, double duration_s) {
  SignalSlice s;
  s.sample_rate = kRate;
  s.duration = duration_s;
  s.samples.resize(static_cast<std::size_t>(duration_s * kRate));
  for (double& v : s.samples) v = sigma * gaussian(rng);
  return s;
}

// flat white-noise bursts of `dur` seconds at the given rms, centered on the
// peak times
void inject_pulses(SignalSlice* slice, const std::vector<double>& peak_times,
                   double dur, double rms, RngEngine& rng) {
  for (double t : peak_times) {
    const auto i0 = static_cast<std::size_t>(
        std::lround((t - dur / 2.0) * kRate));
    const auto n = static_cast<std::size_t>(std::lround(dur * kRate));
    for (std::size_t i = 0; i < n && i0 + i < slice->samples.size(); ++i) {
      slice->samples[i0 + i] += rms * gaussian(rng);
    }
  }
}

PulseTrainEvent event_with_peaks(std::vector<double> peak_times) {
  PulseTrainEvent e;
  e.peak_times = std::move(peak_times);
  e.peak_heights.assign(e.peak_times.size(), 10);
  e.start_time = e.peak_times.front();
  e.end_time = e.peak_times.back();
  e.f_lo_hz = 75.0;
  e.f_hi_hz = 350.0;
  return e;
}

BinaryImage empty_bw(double duration_s) {
  BinaryImage bw;
  bw.geom.n_time = static_cast<std::size_t>(
      (duration_s * kRate - 512) / 41 + 1);
  bw.geom.n_freq = 70;
  bw.geom.time_bin_s = 41.0 / kRate;
  bw.geom.freq_bin_hz = kRate / 512.0;
  bw.geom.f0_hz = 20 * kRate / 512.0;
  bw.geom.frame_center_s = 256.0 / kRate;
  bw.bits.assign(bw.geom.n_time * bw.geom.n_freq, 0);
  return bw;
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("f1, f4, f7: 15 peaks spanning 5.0 to 9.2 seconds") {
  std::vector<double> peaks;
  for (int i = 0; i < 15; ++i) peaks.push_back(5.0 + 4.2 * i / 14.0);
  RngEngine rng(1);
  SignalSlice slice = noise_slice(rng, 0.01, 30.0);
  const FeatureVector fv =
      extract_features(event_with_peaks(peaks), slice, empty_bw(30.0));

  CHECK(fv.f1_delta_time_s == doctest::Approx(4.2).epsilon(1e-12));
  CHECK(fv.f4_num_clicks == 15.0);
  CHECK(fv.f7_avg_sharpness_per_s == doctest::Approx(15.0 / 4.2));
  // the arithmetic identity holds exactly, not just approximately
  CHECK(fv.f7_avg_sharpness_per_s == fv.f4_num_clicks / fv.f1_delta_time_s);
}

TEST_CASE("uniform peak spacing collapses the IPI statistics") {
  std::vector<double> peaks;
  const double d = 12.0 * (41.0 / kRate);  // on the bin grid
  for (int i = 0; i < 10; ++i) peaks.push_back(5.0 + d * i);
  RngEngine rng(2);
  SignalSlice slice = noise_slice(rng, 0.01, 30.0);
  const FeatureVector fv =
      extract_features(event_with_peaks(peaks), slice, empty_bw(30.0));

  CHECK(fv.f10_ipi_mean_s == doctest::Approx(d).epsilon(1e-9));
  CHECK(fv.f11_ipi_mode_s == doctest::Approx(d).epsilon(1e-9));
  CHECK(fv.f12_ipi_max_s == doctest::Approx(d).epsilon(1e-9));
  CHECK(fv.f13_ipi_min_s == doctest::Approx(d).epsilon(1e-9));
}

TEST_CASE("ipi ordering invariants hold for jittered spacing") {
  RngEngine rng(3);
  std::vector<double> peaks;
  double t = 2.0;
  for (int i = 0; i < 20; ++i) {
    peaks.push_back(t);
    t += uniform_range(rng, 0.22, 0.36);
  }
  SignalSlice slice = noise_slice(rng, 0.01, 30.0);
  const FeatureVector fv =
      extract_features(event_with_peaks(peaks), slice, empty_bw(30.0));

  CHECK(fv.f13_ipi_min_s <= fv.f10_ipi_mean_s);
  CHECK(fv.f10_ipi_mean_s <= fv.f12_ipi_max_s);
  CHECK(fv.f13_ipi_min_s <= fv.f11_ipi_mode_s);
  CHECK(fv.f11_ipi_mode_s <= fv.f12_ipi_max_s);
}

TEST_CASE("pulses at +20 dB over noise give f14 near 20") {
  RngEngine rng(4);
  const double sigma = 0.01;
  SignalSlice slice = noise_slice(rng, sigma, 30.0);
  std::vector<double> peaks;
  for (int i = 0; i < 12; ++i) peaks.push_back(5.0 + 0.30 * i);
  // 50 ms flat bursts matching the feature pulse window exactly
  inject_pulses(&slice, peaks, 0.05, sigma * std::pow(10.0, 20.0 / 20.0),
                rng);

  const FeatureVector fv =
      extract_features(event_with_peaks(peaks), slice, empty_bw(30.0));
  CHECK(std::abs(fv.f14_snr_db - 20.0) <= 1.5);
  // percentile SNRs weaken as the noise percentile rises
  CHECK(fv.f15_snr_p05_db >= fv.f16_snr_p10_db);
  CHECK(fv.f16_snr_p10_db >= fv.f17_snr_p20_db);
  CHECK(fv.f17_snr_p20_db >= fv.f18_snr_p25_db);
}

TEST_CASE("frequency bounds come from white pixels in pulse columns") {
  RngEngine rng(5);
  SignalSlice slice = noise_slice(rng, 0.01, 30.0);
  std::vector<double> peaks = {5.0, 5.3, 5.6, 5.9};

  BinaryImage bw = empty_bw(30.0);
  // paint white pixels in rows 10..29 (freq bins) of the columns holding the
  // first peak; bin frequencies are f0 + m * df
  const auto col = static_cast<std::size_t>(
      std::lround((5.0 - bw.geom.frame_center_s) / bw.geom.time_bin_s));
  for (std::size_t m = 10; m < 30; ++m) bw.bits[col * bw.geom.n_freq + m] = 1;

  const FeatureVector fv =
      extract_features(event_with_peaks(peaks), slice, bw);
  const double f_lo = bw.geom.f0_hz + 10 * bw.geom.freq_bin_hz;
  const double f_hi = bw.geom.f0_hz + 29 * bw.geom.freq_bin_hz;
  CHECK(fv.f2_freq_min_hz == doctest::Approx(f_lo));
  CHECK(fv.f3_freq_max_hz == doctest::Approx(f_hi));
  CHECK(fv.f6_center_freq_hz == doctest::Approx((f_lo + f_hi) / 2.0));
  CHECK(fv.f2_freq_min_hz <= fv.f6_center_freq_hz);
  CHECK(fv.f6_center_freq_hz <= fv.f3_freq_max_hz);
  // only one pulse had white pixels; its bandwidth is the mean
  CHECK(fv.f5_avg_bandwidth_hz == doctest::Approx(f_hi - f_lo));
}

TEST_CASE("level features shift by 20 log10(c); times and SNR do not") {
  RngEngine rng(6);
  const double sigma = 0.01;
  SignalSlice slice = noise_slice(rng, sigma, 30.0);
  std::vector<double> peaks;
  for (int i = 0; i < 10; ++i) peaks.push_back(4.0 + 0.3 * i);
  inject_pulses(&slice, peaks, 0.05, sigma * 31.6, rng);

  const FeatureVector base =
      extract_features(event_with_peaks(peaks), slice, empty_bw(30.0));

  SignalSlice scaled = slice;
  const double c = 10.0;
  for (double& v : scaled.samples) v *= c;
  const FeatureVector out =
      extract_features(event_with_peaks(peaks), scaled, empty_bw(30.0));

  CHECK(out.f1_delta_time_s == base.f1_delta_time_s);
  CHECK(out.f10_ipi_mean_s == base.f10_ipi_mean_s);
  CHECK(out.f8_cec_db ==
        doctest::Approx(base.f8_cec_db + 20.0).epsilon(1e-9));
  CHECK(out.f9_mean_leq_db ==
        doctest::Approx(base.f9_mean_leq_db + 20.0).epsilon(1e-9));
  CHECK(out.f14_snr_db == doctest::Approx(base.f14_snr_db).epsilon(1e-9));
  CHECK(out.f15_snr_p05_db ==
        doctest::Approx(base.f15_snr_p05_db).epsilon(1e-9));
}

TEST_CASE("leq_db basics and oracle equality") {
  std::vector<double> ones(1000, 1.0);
  CHECK(leq_db(ones.data(), ones.size()) == doctest::Approx(0.0));

  std::vector<double> tenth(1000, 0.1);
  CHECK(leq_db(tenth.data(), tenth.size()) == doctest::Approx(-20.0));

  RngEngine rng(7);
  std::vector<double> random(5000);
  for (double& v : random) v = uniform_range(rng, -0.5, 0.5);
  double ms = 0.0;
  for (double v : random) ms += v * v;
  ms /= static_cast<double>(random.size());
  CHECK(std::abs(leq_db(random.data(), random.size()) -
                 10.0 * std::log10(ms)) <= 1e-9);

  std::vector<double> silent(100, 0.0);
  CHECK(leq_db(silent.data(), silent.size()) == -120.0);  // floor
}

TEST_CASE("snr percentiles: flat slice gives identical values") {
  SignalSlice slice;
  slice.sample_rate = kRate;
  slice.duration = 30.0;
  slice.samples.assign(60000, 0.02);  // every bin has the same rms
  const auto event = event_with_peaks({5.0, 5.3, 5.6});

  const double bin = 41.0 / kRate;
  const double p05 = snr_percentile_db(event, slice, 5.0, bin);
  const double p25 = snr_percentile_db(event, slice, 25.0, bin);
  CHECK(p05 == doctest::Approx(p25));
}

TEST_CASE("snr percentiles decrease strictly when bin levels ramp") {
  SignalSlice slice;
  slice.sample_rate = kRate;
  slice.duration = 30.0;
  slice.samples.resize(60000);
  // per-bin amplitude ramps up across the slice
  const std::size_t bin_len = 41;
  for (std::size_t i = 0; i < slice.samples.size(); ++i) {
    const double level = 0.001 + 0.001 * static_cast<double>(i / bin_len);
    slice.samples[i] = level;
  }
  const auto event = event_with_peaks({1.0, 1.3, 1.6, 1.9});
  const double bin = 41.0 / kRate;
  const double p05 = snr_percentile_db(event, slice, 5.0, bin);
  const double p10 = snr_percentile_db(event, slice, 10.0, bin);
  const double p20 = snr_percentile_db(event, slice, 20.0, bin);
  const double p25 = snr_percentile_db(event, slice, 25.0, bin);
  CHECK(p05 > p10);
  CHECK(p10 > p20);
  CHECK(p20 > p25);
}

TEST_CASE("synthetic clip: injected snr is recovered within 1.5 dB") {
  SynthSpec spec;
  spec.seed = 88;
  spec.noise_variance = 1e-4;
  TrainSpec train;
  train.start_s = 3.0;
  train.pulse_rate_hz = 3.3;
  train.n_pulses = 60;
  train.pulse_dur_s = 0.050;
  train.band_lo_hz = 100.0;
  train.band_hi_hz = 300.0;
  train.snr_db = 20.0;
  train.rate_jitter_pct = 0.0;
  spec.trains.push_back(train);
  const ClipResult clip = generate_clip(spec);

  // features see the band-filtered slice, like the real pipeline
  const FilterKernel kernel = design_bandpass(FilterSpec{}, kRate);
  SignalSlice slice;
  slice.samples = clip.stream.samples;
  slice.sample_rate = kRate;
  slice.duration = 30.0;
  const SignalSlice filtered = apply_filter(slice, kernel);

  const auto event = event_with_peaks(clip.truth.intervals[0].pulse_times);
  const FeatureVector fv = extract_features(event, filtered, empty_bw(30.0));
  CHECK(std::abs(fv.f14_snr_db - 20.0) <= 1.5);
}

TEST_CASE("degenerate events are rejected") {
  RngEngine rng(9);
  SignalSlice slice = noise_slice(rng, 0.01, 30.0);
  PulseTrainEvent e;
  e.peak_times = {5.0};
  e.peak_heights = {9};
  CHECK_THROWS_AS(extract_features(e, slice, empty_bw(30.0)), Error);
}

TEST_SUITE_END();
