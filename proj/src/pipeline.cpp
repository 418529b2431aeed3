#include "pulsekit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <sstream>

#include "pulsekit/csv.hpp"
#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

std::string slice_name(const std::string& source, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%04zu", index);
  return source + buf;
}

struct SliceOutcome {
  std::optional<PulseTrainEvent> event;
  std::optional<FeatureVector> features;
  SliceDiagnostic diagnostic;
  std::optional<EnergyProjection> projection;
};

SliceOutcome process_slice(const SignalSlice& slice,
                           const DetectorConfig& detector_cfg,
                           const FilterKernel& kernel,
                           const FeatureParams& feature_params,
                           const std::string& slice_id,
                           bool keep_projection) {
  SliceArtifacts artifacts;
  const SliceDetection detection =
      detect_slice(slice, detector_cfg, kernel, &artifacts);

  SliceOutcome outcome;
  outcome.diagnostic.slice_id = slice_id;
  outcome.diagnostic.start_s = slice.start_time;
  outcome.diagnostic.peak_count = detection.peak_count;
  outcome.diagnostic.reason = detection.reason;
  if (detection.event) {
    PulseTrainEvent event = *detection.event;
    event.slice_id = slice_id;
    outcome.features = extract_features(event, artifacts.filtered,
                                        artifacts.binary, feature_params);
    outcome.event = std::move(event);
  }
  if (keep_projection) outcome.projection = std::move(artifacts.projection);
  return outcome;
}

}  // namespace

DetectRun detect_stream(const AudioStream& stream, const RunConfig& config,
                        const std::string& source_id, int jobs,
                        bool keep_projections) {
  const DetectorConfig detector_cfg = config.detector_config();
  const FilterKernel kernel =
      design_bandpass(detector_cfg.filter, stream.sample_rate);
  const std::vector<SignalSlice> slices =
      slice_windows(stream, config.window_s, config.hop_s);

  std::vector<SliceOutcome> outcomes(slices.size());
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      outcomes[i] =
          process_slice(slices[i], detector_cfg, kernel, config.features,
                        slice_name(source_id, i), keep_projections);
    }
  };

  const int n_jobs = std::max(1, jobs);
  if (n_jobs == 1 || slices.size() < 2) {
    worker(0, slices.size());
  } else {
    // fixed partitioning; outcomes land in slice order regardless of timing
    const std::size_t chunk =
        (slices.size() + static_cast<std::size_t>(n_jobs) - 1) /
        static_cast<std::size_t>(n_jobs);
    std::vector<std::future<void>> futures;
    for (std::size_t begin = 0; begin < slices.size(); begin += chunk) {
      const std::size_t end = std::min(begin + chunk, slices.size());
      futures.push_back(
          std::async(std::launch::async, worker, begin, end));
    }
    for (auto& f : futures) f.get();
  }

  DetectRun run;
  run.n_slices = static_cast<long>(slices.size());
  run.hours = stream.duration_s() / 3600.0;

  std::vector<PulseTrainEvent> events;
  std::vector<FeatureVector> features;
  for (auto& outcome : outcomes) {
    run.diagnostics.push_back(std::move(outcome.diagnostic));
    if (outcome.event) {
      events.push_back(std::move(*outcome.event));
      features.push_back(std::move(*outcome.features));
    }
    if (outcome.projection) {
      run.projections.push_back(
          {run.diagnostics.back().slice_id, std::move(*outcome.projection)});
    }
  }

  // events carry their first peak time, which need not follow slice order
  // when slices overlap; merge wants start_time order
  std::vector<std::size_t> order(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return events[a].start_time < events[b].start_time;
                   });
  std::vector<PulseTrainEvent> sorted_events;
  std::vector<FeatureVector> sorted_features;
  for (std::size_t idx : order) {
    sorted_events.push_back(std::move(events[idx]));
    sorted_features.push_back(std::move(features[idx]));
  }
  features = std::move(sorted_features);

  const double time_bin_s =
      static_cast<double>(config.stft.hop_samples) / stream.sample_rate;
  std::vector<std::size_t> representatives;
  std::vector<PulseTrainEvent> merged =
      merge_overlapping_events(std::move(sorted_events), time_bin_s,
                               &representatives);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    DetectedEvent de;
    de.event = std::move(merged[i]);
    // merged events keep the feature vector of their best single-window view
    de.features = features[representatives[i]];
    de.source = source_id;
    run.events.push_back(std::move(de));
  }
  return run;
}

std::vector<Prediction> classify_events(const ForestModel& model,
                                        std::vector<DetectedEvent>* events,
                                        double decision_threshold) {
  std::vector<Prediction> predictions;
  predictions.reserve(events->size());
  for (auto& de : *events) {
    const Prediction p = predict(model, de.features, decision_threshold);
    de.event.score = p.score;
    predictions.push_back(p);
  }
  return predictions;
}

std::string events_csv(const std::vector<DetectedEvent>& events) {
  CsvWriter w({"slice_id", "source", "start_s", "end_s", "n_peaks",
               "f_lo_hz", "f_hi_hz", "score"});
  for (const auto& de : events) {
    w.add_row({de.event.slice_id, de.source,
               format_double(de.event.start_time),
               format_double(de.event.end_time),
               std::to_string(de.event.peak_times.size()),
               format_double(de.event.f_lo_hz),
               format_double(de.event.f_hi_hz),
               de.event.score ? format_double(*de.event.score) : ""});
  }
  return w.text();
}

std::string features_csv(const std::vector<DetectedEvent>& events) {
  std::vector<std::string> header;
  for (int i = 1; i <= 18; ++i) header.push_back("f" + std::to_string(i));
  header.push_back("label");
  CsvWriter w(header);
  for (const auto& de : events) {
    std::vector<std::string> row;
    for (double v : de.features.values()) row.push_back(format_double(v));
    row.push_back(label_name(de.features.label));
    w.add_row(std::move(row));
  }
  return w.text();
}

std::string diagnostics_csv(const std::vector<SliceDiagnostic>& diags) {
  CsvWriter w({"slice_id", "start_s", "peak_count", "outcome"});
  for (const auto& d : diags) {
    w.add_row({d.slice_id, format_double(d.start_s),
               std::to_string(d.peak_count), reject_reason_name(d.reason)});
  }
  return w.text();
}

std::string projections_csv(const std::vector<ProjectionDump>& dumps) {
  CsvWriter w({"slice_id", "bin", "time_s", "value"});
  for (const auto& dump : dumps) {
    for (std::size_t n = 0; n < dump.projection.values.size(); ++n) {
      w.add_row({dump.slice_id, std::to_string(n),
                 format_double(dump.projection.time_of(n)),
                 std::to_string(dump.projection.values[n])});
    }
  }
  return w.text();
}

std::vector<FeatureVector> read_features_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 19) {
    throw schema_error(path + ": feature CSV must have f1..f18,label");
  }
  for (int i = 0; i < 18; ++i) {
    if (table.header[i] != "f" + std::to_string(i + 1)) {
      throw schema_error(path + ": feature CSV column " + std::to_string(i) +
                         " must be f" + std::to_string(i + 1));
    }
  }
  if (table.header[18] != "label") {
    throw schema_error(path + ": last feature CSV column must be label");
  }
  std::vector<FeatureVector> out;
  for (const auto& row : table.rows) {
    std::array<double, 18> values{};
    for (int i = 0; i < 18; ++i) {
      values[i] = parse_double(row[i], path);
      if (!std::isfinite(values[i])) {
        throw data_error(path + ": non-finite feature value");
      }
    }
    out.push_back(FeatureVector::from_values(values, parse_label(row[18])));
  }
  return out;
}

RocCurve sweep_system_roc(const std::vector<DetectedEvent>& events,
                          const std::vector<TruthInterval>& truth,
                          long n_slices, double hours) {
  std::vector<double> thresholds;
  for (const auto& de : events) {
    if (de.event.score) thresholds.push_back(*de.event.score);
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  RocCurve curve;
  curve.points.push_back(
      {std::numeric_limits<double>::infinity(), 0.0, 0.0});
  double prev_fpr = 0.0;
  double prev_tpr = 0.0;
  for (double thr : thresholds) {
    std::vector<PredictedInterval> kept;
    for (const auto& de : events) {
      if (de.event.score && *de.event.score >= thr) {
        kept.push_back({de.event.start_time, de.event.end_time, de.source});
      }
    }
    const ConfusionMatrix cm =
        match_events_to_truth_grouped(kept, truth, n_slices, hours);
    const MetricsReport m = compute_metrics(cm);
    curve.points.push_back({thr, m.fpr, m.tpr});
    curve.auc += (m.fpr - prev_fpr) * (m.tpr + prev_tpr) / 2.0;
    prev_fpr = m.fpr;
    prev_tpr = m.tpr;
  }
  // close the curve at (1,1) for the integral even though the sweep cannot
  // reach it (events below the lowest score do not exist)
  curve.auc += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
  curve.points.push_back({0.0, 1.0, 1.0});
  return curve;
}

std::string metrics_report_text(const ConfusionMatrix& cm,
                                const MetricsReport& metrics) {
  std::ostringstream out;
  out << "confusion tp=" << cm.tp << " fp=" << cm.fp << " tn=" << cm.tn
      << " fn=" << cm.fn << " hours=" << format_double(cm.hours) << "\n";
  out << "tpr " << format_double(metrics.tpr) << "\n";
  out << "fpr " << format_double(metrics.fpr) << "\n";
  out << "ppv " << format_double(metrics.ppv) << "\n";
  out << "f1 " << format_double(metrics.f1) << "\n";
  out << "fp_per_hour " << format_double(metrics.fp_per_hour) << "\n";
  if (metrics.auc >= 0.0) out << "auc " << format_double(metrics.auc) << "\n";
  if (metrics.degenerate) out << "note zero-denominator metrics reported as 0\n";
  return out.str();
}

std::string roc_csv(const RocCurve& curve) {
  CsvWriter w({"threshold", "fpr", "tpr"});
  for (const auto& p : curve.points) {
    w.add_row({std::isinf(p.threshold) ? "inf" : format_double(p.threshold),
               format_double(p.fpr), format_double(p.tpr)});
  }
  return w.text();
}

}  // namespace pulsekit
