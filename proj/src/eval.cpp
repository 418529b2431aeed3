#include "pulsekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pulsekit/error.hpp"
#include "pulsekit/rng.hpp"

namespace pulsekit {

namespace {

bool spans_match(double ps, double pe, double ts, double te) {
  const double inter = std::min(pe, te) - std::max(ps, ts);
  if (inter <= 0.0) return false;
  const double shorter = std::min(pe - ps, te - ts);
  return inter >= 0.25 * shorter;
}

}  // namespace

ConfusionMatrix match_events_to_truth(
    const std::vector<PredictedInterval>& predictions,
    const std::vector<TruthInterval>& truth, long evaluated_slices,
    double hours) {
  for (std::size_t i = 1; i < truth.size(); ++i) {
    if (truth[i].start_s < truth[i - 1].start_s) {
      throw data_error("truth intervals must be time-sorted");
    }
    if (truth[i].start_s < truth[i - 1].end_s) {
      throw data_error("overlapping-truth-intervals in ground truth");
    }
  }

  std::vector<bool> truth_hit(truth.size(), false);
  long fp = 0;
  for (const auto& p : predictions) {
    bool matched = false;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (spans_match(p.start_s, p.end_s, truth[t].start_s, truth[t].end_s)) {
        truth_hit[t] = true;
        matched = true;
      }
    }
    if (!matched) ++fp;
  }

  ConfusionMatrix cm;
  cm.fp = fp;
  for (bool hit : truth_hit) {
    if (hit) {
      ++cm.tp;
    } else {
      ++cm.fn;
    }
  }
  cm.tn = std::max(0L, evaluated_slices - (cm.tp + cm.fp + cm.fn));
  cm.hours = hours;
  return cm;
}

ConfusionMatrix match_events_to_truth_grouped(
    const std::vector<PredictedInterval>& predictions,
    const std::vector<TruthInterval>& truth, long evaluated_slices,
    double hours) {
  bool sourced = false;
  for (const auto& t : truth) sourced = sourced || !t.source.empty();
  if (!sourced) {
    return match_events_to_truth(predictions, truth, evaluated_slices, hours);
  }

  std::set<std::string> sources;
  for (const auto& t : truth) sources.insert(t.source);
  for (const auto& p : predictions) sources.insert(p.source);

  ConfusionMatrix total;
  for (const auto& source : sources) {
    std::vector<PredictedInterval> preds;
    for (const auto& p : predictions) {
      if (p.source == source) preds.push_back(p);
    }
    std::vector<TruthInterval> truths;
    for (const auto& t : truth) {
      if (t.source == source) truths.push_back(t);
    }
    std::sort(truths.begin(), truths.end(),
              [](const TruthInterval& a, const TruthInterval& b) {
                return a.start_s < b.start_s;
              });
    const ConfusionMatrix cm = match_events_to_truth(preds, truths, 0, 0.0);
    total.tp += cm.tp;
    total.fp += cm.fp;
    total.fn += cm.fn;
  }
  total.tn = std::max(0L, evaluated_slices - (total.tp + total.fp + total.fn));
  total.hours = hours;
  return total;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  auto ratio = [&r](double num, double den) {
    if (den <= 0.0) {
      r.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  r.tpr = ratio(static_cast<double>(cm.tp),
                static_cast<double>(cm.tp + cm.fn));
  r.fpr = ratio(static_cast<double>(cm.fp),
                static_cast<double>(cm.fp + cm.tn));
  r.ppv = ratio(static_cast<double>(cm.tp),
                static_cast<double>(cm.tp + cm.fp));
  r.f1 = (r.ppv + r.tpr) > 0.0 ? 2.0 * r.ppv * r.tpr / (r.ppv + r.tpr) : 0.0;
  if (cm.fp > 0 && cm.hours <= 0.0) {
    throw data_error("hours must be > 0 to report FP/h");
  }
  r.fp_per_hour = cm.hours > 0.0 ? cm.fp / cm.hours : 0.0;
  return r;
}

RocCurve roc_auc(const std::vector<double>& scores,
                 const std::vector<bool>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw data_error("roc: scores and labels must be same nonzero length");
  }
  long pos = 0;
  for (bool l : labels) pos += l ? 1 : 0;
  const long neg = static_cast<long>(labels.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw data_error("one-class-labels: ROC needs both classes");
  }

  // group by descending score; each distinct score is one sweep threshold
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  long tp = 0;
  long fp = 0;
  double auc = 0.0;
  double prev_tpr = 0.0;
  double prev_fpr = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    const double tpr = static_cast<double>(tp) / pos;
    const double fpr = static_cast<double>(fp) / neg;
    auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;  // trapezoid
    curve.points.push_back({s, fpr, tpr});
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  curve.auc = auc;
  return curve;
}

void split_train_test(const std::vector<FeatureVector>& data,
                      double train_fraction, std::uint64_t seed,
                      std::vector<FeatureVector>* train,
                      std::vector<FeatureVector>* test) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw data_error("train fraction must be in (0, 1)");
  }
  train->clear();
  test->clear();

  RngEngine rng = seeded_engine(seed, kSeedSaltSplit);
  for (EventLabel label : {EventLabel::minke, EventLabel::non_minke,
                           EventLabel::unlabeled}) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == label) indices.push_back(i);
    }
    if (indices.empty()) continue;
    shuffle(rng, indices);
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(indices.size()) +
                   0.5));
    if (n_train == 0 || n_train == indices.size()) {
      throw data_error("empty-class-after-split: class '" +
                       std::string(label_name(label)) +
                       "' has no examples on one side");
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
      (i < n_train ? train : test)->push_back(data[indices[i]]);
    }
  }
  if (train->empty() || test->empty()) {
    throw data_error("empty-class-after-split: no data");
  }
}

}  // namespace pulsekit
