// Energy projection of the binary image, supra-threshold local maxima, and
// the pulse-train rule set that turns peak patterns into detection events.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pulsekit/binarize.hpp"

namespace pulsekit {

// White-pixel count per time bin.
struct EnergyProjection {
  std::vector<int> values;
  double time_bin_s = 0.0;
  double start_time = 0.0;
  double frame_center_s = 0.0;

  double time_of(std::size_t index) const {
    return start_time + static_cast<double>(index) * time_bin_s +
           frame_center_s;
  }
};

struct PeakList {
  std::vector<std::size_t> indices;  // strictly increasing
  std::vector<int> heights;
  int threshold = 0;
};

struct PulseRules {
  int threshold = 6;
  int min_peaks = 8;
  int max_peaks = 135;
  double ipi_lo_s = 1.0 / 4.5;
  double ipi_hi_s = 1.0 / 2.8;
  double ipi_conformity = 0.6;
};

enum class RejectReason { none, too_few, too_many, ipi_nonconforming };
const char* reject_reason_name(RejectReason reason);

struct PulseTrainEvent {
  double start_time = 0.0;  // absolute seconds, first accepted peak
  double end_time = 0.0;    // last accepted peak
  std::vector<double> peak_times;
  std::vector<int> peak_heights;
  double f_lo_hz = 0.0;  // crop bounds until features refine them
  double f_hi_hz = 0.0;
  std::string slice_id;
  std::optional<double> score;  // classifier probability, filled later
};

EnergyProjection energy_projection(const BinaryImage& bw);

// Plateau-first local maxima strictly above `threshold`: an index qualifies
// when the projection strictly rises into it (or it is the left edge) and
// strictly falls after its plateau (or the plateau reaches the right edge).
PeakList find_local_maxima(const EnergyProjection& projection, int threshold);

struct RuleDecision {
  std::optional<PulseTrainEvent> event;
  RejectReason reason = RejectReason::none;
};

// Accepts when the peak count lies in [min_peaks, max_peaks] and at least
// ipi_conformity of consecutive gaps fall inside the IPI band widened by one
// time bin for grid quantization.
RuleDecision apply_pulse_train_rules(const PeakList& peaks,
                                     const PulseRules& rules,
                                     const EnergyProjection& projection);

struct DetectorConfig {
  FilterSpec filter;
  StftParams stft;
  double crop_lo_hz = 75.0;
  double crop_hi_hz = 350.0;
  double gamma_coefficient = 1.75;
  double dyn_range_db = 60.0;
  PulseRules rules;
};

// Intermediate products a caller may want after detection (feature extraction
// needs the filtered samples and the binary image the event came from).
struct SliceArtifacts {
  SignalSlice filtered;
  BinaryImage binary;
  EnergyProjection projection;
};

struct SliceDetection {
  std::optional<PulseTrainEvent> event;
  RejectReason reason = RejectReason::none;
  int peak_count = 0;
};

// Full per-slice chain: filter -> spectrogram -> intensity -> mask ->
// binarize -> projection -> peaks -> rules. At most one event per slice.
// The kernel must be designed for the slice's sample rate (pass the result of
// design_bandpass(config.filter, rate)).
SliceDetection detect_slice(const SignalSlice& slice,
                            const DetectorConfig& config,
                            const FilterKernel& kernel,
                            SliceArtifacts* artifacts = nullptr);

// Merges events whose spans overlap by at least half the shorter span.
// Merged events take the union span; peak times are deduplicated within half
// a time bin. Input must be sorted by start_time. When `representatives` is
// given it receives, per merged event, the input index of the constituent
// with the most peaks (ties toward the earlier event) -- the pipeline uses it
// to carry per-slice feature vectors across the merge.
std::vector<PulseTrainEvent> merge_overlapping_events(
    std::vector<PulseTrainEvent> events, double time_bin_s,
    std::vector<std::size_t>* representatives = nullptr);

}  // namespace pulsekit
