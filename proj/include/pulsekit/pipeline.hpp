// Whole-stream orchestration: slice fan-out, per-slice detection and feature
// extraction, event merging, and the CSV surfaces the CLI writes. Results are
// independent of the worker count.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pulsekit/classifier.hpp"
#include "pulsekit/config.hpp"
#include "pulsekit/eval.hpp"

namespace pulsekit {

struct DetectedEvent {
  PulseTrainEvent event;
  FeatureVector features;
  std::string source;
};

struct SliceDiagnostic {
  std::string slice_id;
  double start_s = 0.0;
  int peak_count = 0;
  RejectReason reason = RejectReason::none;
};

struct ProjectionDump {
  std::string slice_id;
  EnergyProjection projection;
};

struct DetectRun {
  std::vector<DetectedEvent> events;  // merged, time-ordered
  std::vector<SliceDiagnostic> diagnostics;
  long n_slices = 0;
  double hours = 0.0;
  std::vector<ProjectionDump> projections;  // filled when requested
};

// Detects over one stream. `source_id` names the stream in slice ids and CSV
// rows. jobs <= 1 runs serially; any value yields identical results.
DetectRun detect_stream(const AudioStream& stream, const RunConfig& config,
                        const std::string& source_id, int jobs = 1,
                        bool keep_projections = false);

// Applies a trained model to every event in place (fills event.score) and
// returns the per-event predictions.
std::vector<Prediction> classify_events(const ForestModel& model,
                                        std::vector<DetectedEvent>* events,
                                        double decision_threshold);

// CSV surfaces. Events and features files are row-aligned.
std::string events_csv(const std::vector<DetectedEvent>& events);
std::string features_csv(const std::vector<DetectedEvent>& events);
std::string diagnostics_csv(const std::vector<SliceDiagnostic>& diags);
std::string projections_csv(const std::vector<ProjectionDump>& dumps);

std::vector<FeatureVector> read_features_csv(const std::string& path);

// Threshold sweep for the system ROC: at each distinct score, events at or
// above the threshold are matched against truth and one (fpr, tpr) point is
// emitted.
RocCurve sweep_system_roc(const std::vector<DetectedEvent>& events,
                          const std::vector<TruthInterval>& truth,
                          long n_slices, double hours);

std::string metrics_report_text(const ConfusionMatrix& cm,
                                const MetricsReport& metrics);
std::string roc_csv(const RocCurve& curve);

}  // namespace pulsekit
