#include "pulsekit/detector.hpp"

#include <algorithm>
#include <cmath>

#include "pulsekit/error.hpp"
#include "pulsekit/kernels.hpp"

namespace pulsekit {

const char* reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::none:
      return "ok";
    case RejectReason::too_few:
      return "too-few";
    case RejectReason::too_many:
      return "too-many";
    case RejectReason::ipi_nonconforming:
      return "ipi-nonconforming";
  }
  return "ok";
}

EnergyProjection energy_projection(const BinaryImage& bw) {
  if (bw.bits.empty()) throw data_error("empty binary image");
  EnergyProjection p;
  p.time_bin_s = bw.geom.time_bin_s;
  p.start_time = bw.geom.start_time;
  p.frame_center_s = bw.geom.frame_center_s;
  p.values.resize(bw.geom.n_time);
  const std::size_t m = bw.geom.n_freq;
  for (std::size_t n = 0; n < bw.geom.n_time; ++n) {
    p.values[n] =
        static_cast<int>(kernels::count_ones(bw.bits.data() + n * m, m));
  }
  return p;
}

PeakList find_local_maxima(const EnergyProjection& projection, int threshold) {
  if (threshold < 0) throw data_error("peak threshold must be >= 0");
  const auto& v = projection.values;
  const std::size_t n = v.size();
  PeakList peaks;
  peaks.threshold = threshold;

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;  // plateau [i, j]
    const bool rises = i == 0 || v[i - 1] < v[i];
    const bool falls = j == n - 1 || v[j + 1] < v[i];
    if (rises && falls && v[i] > threshold) {
      peaks.indices.push_back(i);  // plateau-first
      peaks.heights.push_back(v[i]);
    }
    i = j + 1;
  }
  return peaks;
}

RuleDecision apply_pulse_train_rules(const PeakList& peaks,
                                     const PulseRules& rules,
                                     const EnergyProjection& projection) {
  RuleDecision decision;
  const auto count = static_cast<int>(peaks.indices.size());
  if (count < rules.min_peaks) {
    decision.reason = RejectReason::too_few;
    return decision;
  }
  if (count > rules.max_peaks) {
    decision.reason = RejectReason::too_many;
    return decision;
  }

  // IPI band widened by one time bin to absorb grid quantization
  const double lo = rules.ipi_lo_s - projection.time_bin_s;
  const double hi = rules.ipi_hi_s + projection.time_bin_s;
  int conforming = 0;
  const int gaps = count - 1;
  for (int g = 0; g < gaps; ++g) {
    const double gap = static_cast<double>(peaks.indices[g + 1] -
                                           peaks.indices[g]) *
                       projection.time_bin_s;
    if (gap >= lo && gap <= hi) ++conforming;
  }
  if (gaps == 0 ||
      static_cast<double>(conforming) < rules.ipi_conformity * gaps) {
    decision.reason = RejectReason::ipi_nonconforming;
    return decision;
  }

  PulseTrainEvent event;
  event.peak_times.reserve(peaks.indices.size());
  for (std::size_t idx : peaks.indices) {
    event.peak_times.push_back(projection.time_of(idx));
  }
  event.peak_heights = peaks.heights;
  event.start_time = event.peak_times.front();
  event.end_time = event.peak_times.back();
  decision.event = std::move(event);
  return decision;
}

SliceDetection detect_slice(const SignalSlice& slice,
                            const DetectorConfig& config,
                            const FilterKernel& kernel,
                            SliceArtifacts* artifacts) {
  SignalSlice filtered = apply_filter(slice, kernel);
  const Spectrogram spec = compute_spectrogram(
      filtered, config.stft, config.crop_lo_hz, config.crop_hi_hz);
  const IntensityImage img = to_intensity_image(spec, config.dyn_range_db);
  const MaskLevel level = compute_mask_level(img, config.gamma_coefficient);
  BinaryImage bw = apply_mask(img, level);
  EnergyProjection projection = energy_projection(bw);
  const PeakList peaks = find_local_maxima(projection, config.rules.threshold);
  RuleDecision decision =
      apply_pulse_train_rules(peaks, config.rules, projection);

  SliceDetection result;
  result.reason = decision.reason;
  result.peak_count = static_cast<int>(peaks.indices.size());
  if (decision.event) {
    decision.event->f_lo_hz = config.crop_lo_hz;
    decision.event->f_hi_hz = config.crop_hi_hz;
    result.event = std::move(decision.event);
  }
  if (artifacts) {
    artifacts->filtered = std::move(filtered);
    artifacts->binary = std::move(bw);
    artifacts->projection = std::move(projection);
  }
  return result;
}

namespace {

double span_of(const PulseTrainEvent& e) { return e.end_time - e.start_time; }

bool should_merge(const PulseTrainEvent& a, const PulseTrainEvent& b) {
  const double inter =
      std::min(a.end_time, b.end_time) - std::max(a.start_time, b.start_time);
  const double shorter = std::min(span_of(a), span_of(b));
  // inclusive at the boundary: spans sharing exactly half the shorter span
  // still describe one train
  return inter > 0.0 && inter >= 0.5 * shorter;
}

PulseTrainEvent merge_pair(const PulseTrainEvent& a, const PulseTrainEvent& b,
                           double time_bin_s) {
  PulseTrainEvent m;
  m.slice_id = a.slice_id;
  m.f_lo_hz = std::min(a.f_lo_hz, b.f_lo_hz);
  m.f_hi_hz = std::max(a.f_hi_hz, b.f_hi_hz);

  // union of peaks, deduplicated within half a time bin (keep the first
  // occurrence, carry the taller height)
  std::vector<std::pair<double, int>> peaks;
  peaks.reserve(a.peak_times.size() + b.peak_times.size());
  for (std::size_t i = 0; i < a.peak_times.size(); ++i) {
    peaks.emplace_back(a.peak_times[i], a.peak_heights[i]);
  }
  for (std::size_t i = 0; i < b.peak_times.size(); ++i) {
    peaks.emplace_back(b.peak_times[i], b.peak_heights[i]);
  }
  std::sort(peaks.begin(), peaks.end());
  const double tol = time_bin_s / 2.0;
  for (const auto& [t, h] : peaks) {
    if (!m.peak_times.empty() && t - m.peak_times.back() <= tol) {
      m.peak_heights.back() = std::max(m.peak_heights.back(), h);
      continue;
    }
    m.peak_times.push_back(t);
    m.peak_heights.push_back(h);
  }
  m.start_time = std::min(a.start_time, b.start_time);
  m.end_time = std::max(a.end_time, b.end_time);
  return m;
}

}  // namespace

std::vector<PulseTrainEvent> merge_overlapping_events(
    std::vector<PulseTrainEvent> events, double time_bin_s,
    std::vector<std::size_t>* representatives) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].start_time < events[i - 1].start_time) {
      throw data_error("merge input must be sorted by start_time");
    }
  }
  std::vector<PulseTrainEvent> merged;
  std::vector<std::size_t> reps;
  std::vector<std::size_t> rep_peaks;  // original peak count of each rep
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::size_t n_peaks = events[i].peak_times.size();
    if (!merged.empty() && should_merge(merged.back(), events[i])) {
      merged.back() = merge_pair(merged.back(), events[i], time_bin_s);
      if (n_peaks > rep_peaks.back()) {
        reps.back() = i;
        rep_peaks.back() = n_peaks;
        merged.back().slice_id = events[i].slice_id;
      }
    } else {
      merged.push_back(std::move(events[i]));
      reps.push_back(i);
      rep_peaks.push_back(n_peaks);
    }
  }
  if (representatives) *representatives = std::move(reps);
  return merged;
}

}  // namespace pulsekit
