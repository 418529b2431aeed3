// Prediction-to-truth matching and the detection metrics: TPR, FPR, PPV, F1,
// FP/h, ROC curve and AUC.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsekit/features.hpp"

namespace pulsekit {

struct ConfusionMatrix {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
  double hours = 0.0;  // duration of evaluated audio
};

struct MetricsReport {
  double tpr = 0.0;
  double fpr = 0.0;
  double ppv = 0.0;
  double f1 = 0.0;
  double fp_per_hour = 0.0;
  double auc = -1.0;          // -1 when no scores were available
  bool degenerate = false;    // some denominator was zero
};

struct TruthInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;
  std::string source;  // recording the interval belongs to; empty = any
};

struct PredictedInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string source;
};

// A prediction matches a truth interval when their intersection covers at
// least a quarter of the shorter span. Every matched truth counts one TP no
// matter how many predictions land on it; unmatched predictions are FP,
// unmatched truths FN, and TN fills up to the evaluated slice count.
// Operates on one timeline; sources are ignored here.
ConfusionMatrix match_events_to_truth(
    const std::vector<PredictedInterval>& predictions,
    const std::vector<TruthInterval>& truth, long evaluated_slices,
    double hours);

// Multi-recording wrapper: when the truth carries source names, predictions
// only match truth from the same source (times restart per recording).
// Truth without sources falls back to the single-timeline matcher.
ConfusionMatrix match_events_to_truth_grouped(
    const std::vector<PredictedInterval>& predictions,
    const std::vector<TruthInterval>& truth, long evaluated_slices,
    double hours);

MetricsReport compute_metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) .. (1,1), threshold descending
  double auc = 0.0;
};

// Threshold sweep over the distinct scores; AUC by trapezoid, which equals
// the normalized Mann-Whitney statistic with ties counted half.
RocCurve roc_auc(const std::vector<double>& scores,
                 const std::vector<bool>& labels);

// Seeded stratified split: shuffles within each class and keeps class
// proportions within one example of train_fraction.
void split_train_test(const std::vector<FeatureVector>& data,
                      double train_fraction, std::uint64_t seed,
                      std::vector<FeatureVector>* train,
                      std::vector<FeatureVector>* test);

}  // namespace pulsekit
