// Per-event feature extraction: 18 measurements over the event's peaks, the
// binary image, and the filtered time series.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "pulsekit/detector.hpp"

namespace pulsekit {

enum class EventLabel { minke, non_minke, unlabeled };
const char* label_name(EventLabel label);
EventLabel parse_label(const std::string& name);

struct FeatureVector {
  double f1_delta_time_s = 0.0;       // duration, first to last peak
  double f2_freq_min_hz = 0.0;        // white-pixel frequency bounds
  double f3_freq_max_hz = 0.0;
  double f4_num_clicks = 0.0;         // pulse count
  double f5_avg_bandwidth_hz = 0.0;   // mean per-pulse (fmax - fmin)
  double f6_center_freq_hz = 0.0;     // (f2 + f3) / 2
  double f7_avg_sharpness_per_s = 0.0;  // f4 / f1, exact
  double f8_cec_db = 0.0;             // cumulative energy content of pulses
  double f9_mean_leq_db = 0.0;        // mean per-pulse Leq
  double f10_ipi_mean_s = 0.0;
  double f11_ipi_mode_s = 0.0;        // mode on the time-bin grid
  double f12_ipi_max_s = 0.0;
  double f13_ipi_min_s = 0.0;
  double f14_snr_db = 0.0;            // vs non-pulse samples in the span
  double f15_snr_p05_db = 0.0;        // vs 5th-percentile time-bin Leq
  double f16_snr_p10_db = 0.0;
  double f17_snr_p20_db = 0.0;
  double f18_snr_p25_db = 0.0;
  EventLabel label = EventLabel::unlabeled;

  std::array<double, 18> values() const;
  static const std::array<std::string, 18>& names();
  static FeatureVector from_values(const std::array<double, 18>& v,
                                   EventLabel label);
};

struct FeatureParams {
  double pulse_window_s = 0.05;  // pulse extent centered on each peak
};

// Equivalent continuous level: 10*log10(mean square), floored at -120 dB.
double leq_db(const double* samples, std::size_t n);

// Signal = mean per-pulse Leq; noise = Leq of the time bin whose RMS sits at
// the given nearest-rank percentile of all time-bin RMS values of the slice.
double snr_percentile_db(const PulseTrainEvent& event,
                         const SignalSlice& filtered, double percentile,
                         double time_bin_s,
                         const FeatureParams& params = {});

// Full Table-style vector for one event. The slice must be the filtered
// slice the event was detected in; the binary image likewise.
FeatureVector extract_features(const PulseTrainEvent& event,
                               const SignalSlice& filtered,
                               const BinaryImage& bw,
                               const FeatureParams& params = {});

}  // namespace pulsekit
