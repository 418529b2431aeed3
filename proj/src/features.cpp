#include "pulsekit/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pulsekit/error.hpp"
#include "pulsekit/kernels.hpp"

namespace pulsekit {

namespace {

constexpr double kLeqFloorDb = -120.0;

struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  bool empty() const { return end <= begin; }
  std::size_t size() const { return end - begin; }
};

// Pulse extent of a peak, clamped to the slice.
SampleRange pulse_range(double peak_time, const SignalSlice& slice,
                        double window_s) {
  const double fs = slice.sample_rate;
  const double rel = peak_time - slice.start_time;
  const auto lo = static_cast<long>(std::lround((rel - window_s / 2.0) * fs));
  const auto hi = static_cast<long>(std::lround((rel + window_s / 2.0) * fs));
  const auto len = static_cast<long>(slice.samples.size());
  SampleRange r;
  r.begin = static_cast<std::size_t>(std::clamp(lo, 0L, len));
  r.end = static_cast<std::size_t>(std::clamp(hi, 0L, len));
  return r;
}

double mean_square(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  return kernels::sum_squares(x, n) / static_cast<double>(n);
}

double to_db(double mean_sq) {
  if (mean_sq <= 1e-12) return kLeqFloorDb;
  return std::max(10.0 * std::log10(mean_sq), kLeqFloorDb);
}

// Sorted mean-square values of the slice's non-overlapping time bins.
std::vector<double> sorted_bin_mean_squares(const SignalSlice& slice,
                                            double time_bin_s) {
  const auto bin_len = static_cast<std::size_t>(
      std::lround(time_bin_s * slice.sample_rate));
  if (bin_len == 0 || slice.samples.size() < bin_len) {
    return {mean_square(slice.samples.data(), slice.samples.size())};
  }
  const std::size_t n_bins = slice.samples.size() / bin_len;
  std::vector<double> ms(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    ms[b] = mean_square(slice.samples.data() + b * bin_len, bin_len);
  }
  std::sort(ms.begin(), ms.end());
  return ms;
}

// Nearest-rank percentile over an ascending-sorted array.
double nearest_rank(const std::vector<double>& sorted, double percentile) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace

const char* label_name(EventLabel label) {
  switch (label) {
    case EventLabel::minke:
      return "minke";
    case EventLabel::non_minke:
      return "non-minke";
    case EventLabel::unlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

EventLabel parse_label(const std::string& name) {
  if (name == "minke") return EventLabel::minke;
  if (name == "non-minke") return EventLabel::non_minke;
  if (name == "unlabeled") return EventLabel::unlabeled;
  throw data_error("unknown label: '" + name + "'");
}

std::array<double, 18> FeatureVector::values() const {
  return {f1_delta_time_s,     f2_freq_min_hz,   f3_freq_max_hz,
          f4_num_clicks,       f5_avg_bandwidth_hz, f6_center_freq_hz,
          f7_avg_sharpness_per_s, f8_cec_db,     f9_mean_leq_db,
          f10_ipi_mean_s,      f11_ipi_mode_s,   f12_ipi_max_s,
          f13_ipi_min_s,       f14_snr_db,       f15_snr_p05_db,
          f16_snr_p10_db,      f17_snr_p20_db,   f18_snr_p25_db};
}

const std::array<std::string, 18>& FeatureVector::names() {
  static const std::array<std::string, 18> kNames = {
      "f1_delta_time_s",     "f2_freq_min_hz",    "f3_freq_max_hz",
      "f4_num_clicks",       "f5_avg_bandwidth_hz", "f6_center_freq_hz",
      "f7_avg_sharpness_per_s", "f8_cec_db",      "f9_mean_leq_db",
      "f10_ipi_mean_s",      "f11_ipi_mode_s",    "f12_ipi_max_s",
      "f13_ipi_min_s",       "f14_snr_db",        "f15_snr_p05_db",
      "f16_snr_p10_db",      "f17_snr_p20_db",    "f18_snr_p25_db"};
  return kNames;
}

FeatureVector FeatureVector::from_values(const std::array<double, 18>& v,
                                         EventLabel label) {
  FeatureVector fv;
  fv.f1_delta_time_s = v[0];
  fv.f2_freq_min_hz = v[1];
  fv.f3_freq_max_hz = v[2];
  fv.f4_num_clicks = v[3];
  fv.f5_avg_bandwidth_hz = v[4];
  fv.f6_center_freq_hz = v[5];
  fv.f7_avg_sharpness_per_s = v[6];
  fv.f8_cec_db = v[7];
  fv.f9_mean_leq_db = v[8];
  fv.f10_ipi_mean_s = v[9];
  fv.f11_ipi_mode_s = v[10];
  fv.f12_ipi_max_s = v[11];
  fv.f13_ipi_min_s = v[12];
  fv.f14_snr_db = v[13];
  fv.f15_snr_p05_db = v[14];
  fv.f16_snr_p10_db = v[15];
  fv.f17_snr_p20_db = v[16];
  fv.f18_snr_p25_db = v[17];
  fv.label = label;
  return fv;
}

double leq_db(const double* samples, std::size_t n) {
  if (n == 0) throw data_error("leq_db: empty segment");
  return to_db(mean_square(samples, n));
}

double snr_percentile_db(const PulseTrainEvent& event,
                         const SignalSlice& filtered, double percentile,
                         double time_bin_s, const FeatureParams& params) {
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw data_error("percentile must be in (0, 100)");
  }
  double signal_db_sum = 0.0;
  int pulses = 0;
  for (double t : event.peak_times) {
    const SampleRange r = pulse_range(t, filtered, params.pulse_window_s);
    if (r.empty()) continue;
    signal_db_sum += to_db(mean_square(filtered.samples.data() + r.begin,
                                       r.size()));
    ++pulses;
  }
  const double signal_db = pulses > 0 ? signal_db_sum / pulses : kLeqFloorDb;
  const auto ms = sorted_bin_mean_squares(filtered, time_bin_s);
  return signal_db - to_db(nearest_rank(ms, percentile));
}

FeatureVector extract_features(const PulseTrainEvent& event,
                               const SignalSlice& filtered,
                               const BinaryImage& bw,
                               const FeatureParams& params) {
  const std::size_t n_peaks = event.peak_times.size();
  if (n_peaks < 2) throw data_error("degenerate-event: fewer than 2 peaks");
  const TfGeometry& geom = bw.geom;

  FeatureVector fv;
  fv.f1_delta_time_s = event.end_time - event.start_time;
  fv.f4_num_clicks = static_cast<double>(n_peaks);
  fv.f7_avg_sharpness_per_s = fv.f4_num_clicks / fv.f1_delta_time_s;

  // per-pulse levels and white-pixel frequency bounds
  double sum_pulse_db = 0.0;
  double sum_pulse_ms = 0.0;
  int measured_pulses = 0;
  double freq_min = 0.0;
  double freq_max = 0.0;
  bool any_white = false;
  double bandwidth_sum = 0.0;
  int bandwidth_pulses = 0;

  for (double t : event.peak_times) {
    const SampleRange r = pulse_range(t, filtered, params.pulse_window_s);
    if (!r.empty()) {
      const double ms = mean_square(filtered.samples.data() + r.begin,
                                    r.size());
      sum_pulse_ms += ms;
      sum_pulse_db += to_db(ms);
      ++measured_pulses;
    }

    // columns whose center time falls in this pulse's extent
    const double t0 = t - params.pulse_window_s / 2.0;
    const double t1 = t + params.pulse_window_s / 2.0;
    double pulse_fmin = 0.0;
    double pulse_fmax = 0.0;
    bool pulse_white = false;
    for (std::size_t col = 0; col < geom.n_time; ++col) {
      const double ct = geom.frame_time(col);
      if (ct < t0) continue;
      if (ct > t1) break;
      for (std::size_t m = 0; m < geom.n_freq; ++m) {
        if (!bw.at(col, m)) continue;
        const double f = geom.f0_hz + static_cast<double>(m) *
                                          geom.freq_bin_hz;
        if (!pulse_white || f < pulse_fmin) pulse_fmin = f;
        if (!pulse_white || f > pulse_fmax) pulse_fmax = f;
        pulse_white = true;
      }
    }
    if (pulse_white) {
      if (!any_white || pulse_fmin < freq_min) freq_min = pulse_fmin;
      if (!any_white || pulse_fmax > freq_max) freq_max = pulse_fmax;
      any_white = true;
      bandwidth_sum += pulse_fmax - pulse_fmin;
      ++bandwidth_pulses;
    }
  }

  if (any_white) {
    fv.f2_freq_min_hz = freq_min;
    fv.f3_freq_max_hz = freq_max;
  } else {
    fv.f2_freq_min_hz = event.f_lo_hz;
    fv.f3_freq_max_hz = event.f_hi_hz;
  }
  fv.f6_center_freq_hz = (fv.f2_freq_min_hz + fv.f3_freq_max_hz) / 2.0;
  fv.f5_avg_bandwidth_hz =
      bandwidth_pulses > 0 ? bandwidth_sum / bandwidth_pulses : 0.0;

  fv.f8_cec_db = to_db(sum_pulse_ms);
  fv.f9_mean_leq_db =
      measured_pulses > 0 ? sum_pulse_db / measured_pulses : kLeqFloorDb;

  // inter-pulse interval statistics over consecutive gaps
  std::vector<double> gaps(n_peaks - 1);
  for (std::size_t i = 0; i + 1 < n_peaks; ++i) {
    gaps[i] = event.peak_times[i + 1] - event.peak_times[i];
  }
  double gap_sum = 0.0;
  double gap_min = gaps[0];
  double gap_max = gaps[0];
  std::map<long, int> grid_counts;  // bin-grid quantized gap -> count
  for (double g : gaps) {
    gap_sum += g;
    gap_min = std::min(gap_min, g);
    gap_max = std::max(gap_max, g);
    ++grid_counts[std::lround(g / geom.time_bin_s)];
  }
  long mode_q = grid_counts.begin()->first;
  int mode_n = grid_counts.begin()->second;
  for (const auto& [q, c] : grid_counts) {
    if (c > mode_n) {  // ties keep the smaller gap (map is ascending)
      mode_q = q;
      mode_n = c;
    }
  }
  fv.f10_ipi_mean_s = gap_sum / static_cast<double>(gaps.size());
  fv.f12_ipi_max_s = gap_max;
  fv.f13_ipi_min_s = gap_min;
  // merged-event peak times can sit off the bin grid; clamp keeps the
  // min <= mode <= max ordering exact
  fv.f11_ipi_mode_s = std::clamp(static_cast<double>(mode_q) *
                                     geom.time_bin_s,
                                 gap_min, gap_max);

  // F14: noise from samples inside the span but outside every pulse extent
  {
    const double fs = filtered.sample_rate;
    const auto len = static_cast<long>(filtered.samples.size());
    auto span_lo = static_cast<long>(
        std::lround((event.start_time - filtered.start_time) * fs));
    auto span_hi = static_cast<long>(
        std::lround((event.end_time - filtered.start_time) * fs));
    span_lo = std::clamp(span_lo, 0L, len);
    span_hi = std::clamp(span_hi, 0L, len);
    std::vector<std::uint8_t> in_pulse(filtered.samples.size(), 0);
    for (double t : event.peak_times) {
      const SampleRange r = pulse_range(t, filtered, params.pulse_window_s);
      std::fill(in_pulse.begin() + static_cast<std::ptrdiff_t>(r.begin),
                in_pulse.begin() + static_cast<std::ptrdiff_t>(r.end), 1);
    }
    double noise_sum_sq = 0.0;
    std::size_t noise_n = 0;
    for (long i = span_lo; i < span_hi; ++i) {
      if (in_pulse[static_cast<std::size_t>(i)]) continue;
      noise_sum_sq += filtered.samples[static_cast<std::size_t>(i)] *
                      filtered.samples[static_cast<std::size_t>(i)];
      ++noise_n;
    }
    if (noise_n == 0) {
      // wall-to-wall pulses: fall back to the rest of the slice
      for (long i = 0; i < len; ++i) {
        if (in_pulse[static_cast<std::size_t>(i)]) continue;
        noise_sum_sq += filtered.samples[static_cast<std::size_t>(i)] *
                        filtered.samples[static_cast<std::size_t>(i)];
        ++noise_n;
      }
    }
    const double noise_db =
        noise_n > 0 ? to_db(noise_sum_sq / static_cast<double>(noise_n))
                    : kLeqFloorDb;
    fv.f14_snr_db = fv.f9_mean_leq_db - noise_db;
  }

  const auto ms = sorted_bin_mean_squares(filtered, geom.time_bin_s);
  fv.f15_snr_p05_db = fv.f9_mean_leq_db - to_db(nearest_rank(ms, 5.0));
  fv.f16_snr_p10_db = fv.f9_mean_leq_db - to_db(nearest_rank(ms, 10.0));
  fv.f17_snr_p20_db = fv.f9_mean_leq_db - to_db(nearest_rank(ms, 20.0));
  fv.f18_snr_p25_db = fv.f9_mean_leq_db - to_db(nearest_rank(ms, 25.0));

  return fv;
}

}  // namespace pulsekit
