#include "pulsekit/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "pulsekit/error.hpp"
#include "pulsekit/rng.hpp"

namespace pulsekit {

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kNumFeatures = 18;

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string fingerprint(const std::vector<FeatureVector>& data,
                        const ForestParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t meta[5] = {params.n_trees, params.n_split_features,
                                params.max_depth, params.min_leaf,
                                static_cast<std::int64_t>(params.seed)};
  h = fnv1a(h, meta, sizeof(meta));
  for (const auto& name : FeatureVector::names()) {
    h = fnv1a(h, name.data(), name.size());
  }
  for (const auto& fv : data) {
    const auto v = fv.values();
    h = fnv1a(h, v.data(), sizeof(double) * v.size());
    const std::uint8_t lab = fv.label == EventLabel::minke ? 1 : 0;
    h = fnv1a(h, &lab, 1);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

RngEngine tree_engine(std::uint64_t seed, int tree_index) {
  // independent stream per tree so parallel growth matches serial
  return RngEngine((seed ^ kSeedSaltForest) +
                   0x9e3779b97f4a7c15ULL *
                       static_cast<std::uint64_t>(tree_index + 1));
}

struct TrainingView {
  const std::vector<std::array<double, 18>>* values;
  const std::vector<std::uint8_t>* labels;  // 1 = minke
};

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

double gini(int minke, int non) {
  const double n = minke + non;
  if (n == 0.0) return 0.0;
  const double pm = minke / n;
  const double pn = non / n;
  return 1.0 - pm * pm - pn * pn;
}

// Best weighted child impurity for one feature over the node's samples.
// Candidate thresholds are midpoints between consecutive distinct values.
void best_split_for_feature(const TrainingView& view,
                            const std::vector<int>& samples, int feature,
                            SplitChoice* best) {
  std::vector<std::pair<double, std::uint8_t>> ordered;
  ordered.reserve(samples.size());
  for (int s : samples) {
    ordered.emplace_back((*view.values)[s][feature], (*view.labels)[s]);
  }
  std::sort(ordered.begin(), ordered.end());

  int total_minke = 0;
  for (const auto& [v, lab] : ordered) total_minke += lab;
  const int total = static_cast<int>(ordered.size());
  const int total_non = total - total_minke;

  int left_minke = 0;
  int left_non = 0;
  for (int i = 0; i + 1 < total; ++i) {
    left_minke += ordered[i].second;
    left_non += 1 - ordered[i].second;
    if (ordered[i].first == ordered[i + 1].first) continue;
    const double thr = (ordered[i].first + ordered[i + 1].first) / 2.0;
    const int ln = i + 1;
    const int rn = total - ln;
    const double weighted =
        (ln * gini(left_minke, left_non) +
         rn * gini(total_minke - left_minke, total_non - left_non)) /
        total;
    // strict < keeps the lowest feature index / lowest threshold on ties
    if (weighted < best->impurity) {
      best->found = true;
      best->feature = feature;
      best->threshold = thr;
      best->impurity = weighted;
    }
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainingView& view, const ForestParams& params,
              RngEngine& rng)
      : view_(view), params_(params), rng_(rng) {}

  DecisionTree build(std::vector<int> samples) {
    tree_.nodes.clear();
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  int make_leaf(const std::vector<int>& samples) {
    TreeNode node;
    for (int s : samples) {
      if ((*view_.labels)[s]) {
        ++node.count_minke;
      } else {
        ++node.count_non;
      }
    }
    tree_.nodes.push_back(node);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  int grow(std::vector<int> samples, int depth) {
    int minke = 0;
    for (int s : samples) minke += (*view_.labels)[s];
    const int non = static_cast<int>(samples.size()) - minke;
    const bool pure = minke == 0 || non == 0;
    const bool depth_capped =
        params_.max_depth > 0 && depth >= params_.max_depth;
    if (pure || depth_capped ||
        static_cast<int>(samples.size()) <= params_.min_leaf) {
      return make_leaf(samples);
    }

    // sample the per-node feature subset, then evaluate in ascending index
    // order so impurity ties resolve deterministically
    int pool[kNumFeatures];
    for (int i = 0; i < kNumFeatures; ++i) pool[i] = i;
    const int k = std::min(params_.n_split_features, kNumFeatures);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<int>(
          uniform_below(rng_, static_cast<std::uint64_t>(kNumFeatures - i)));
      std::swap(pool[i], pool[i + j]);
    }
    std::sort(pool, pool + k);

    SplitChoice best;
    for (int i = 0; i < k; ++i) {
      best_split_for_feature(view_, samples, pool[i], &best);
    }
    const double parent = gini(minke, non);
    if (!best.found || best.impurity >= parent) {
      return make_leaf(samples);  // no impurity reduction available
    }

    std::vector<int> left;
    std::vector<int> right;
    for (int s : samples) {
      if ((*view_.values)[s][best.feature] < best.threshold) {
        left.push_back(s);
      } else {
        right.push_back(s);
      }
    }
    samples.clear();
    samples.shrink_to_fit();

    TreeNode node;
    node.feature = best.feature;
    node.threshold = best.threshold;
    tree_.nodes.push_back(node);
    const int index = static_cast<int>(tree_.nodes.size()) - 1;
    const int left_index = grow(std::move(left), depth + 1);
    const int right_index = grow(std::move(right), depth + 1);
    tree_.nodes[index].left = left_index;
    tree_.nodes[index].right = right_index;
    return index;
  }

  const TrainingView& view_;
  const ForestParams& params_;
  RngEngine& rng_;
  DecisionTree tree_;
};

}  // namespace

bool DecisionTree::vote_minke(const std::array<double, 18>& values) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = values[nodes[i].feature] < nodes[i].threshold ? nodes[i].left
                                                      : nodes[i].right;
  }
  return nodes[i].count_minke > nodes[i].count_non;
}

ForestModel train_forest(const std::vector<FeatureVector>& data,
                         const ForestParams& params) {
  if (data.size() < 2) throw data_error("empty-data: need >= 2 examples");
  if (params.n_trees < 1) throw data_error("n_trees must be >= 1");
  if (params.n_split_features < 1 ||
      params.n_split_features > kNumFeatures) {
    throw data_error("n_split_features must be in [1, 18]");
  }

  std::vector<std::array<double, 18>> values;
  std::vector<std::uint8_t> labels;
  values.reserve(data.size());
  labels.reserve(data.size());
  int minke = 0;
  for (const auto& fv : data) {
    if (fv.label == EventLabel::unlabeled) {
      throw data_error("training data contains unlabeled examples");
    }
    const auto v = fv.values();
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw data_error("training data contains non-finite feature values");
      }
    }
    values.push_back(v);
    labels.push_back(fv.label == EventLabel::minke ? 1 : 0);
    minke += labels.back();
  }
  if (minke == 0 || minke == static_cast<int>(data.size())) {
    throw data_error("single-class-data: need both labels present");
  }

  const TrainingView view{&values, &labels};
  const auto n = data.size();

  ForestModel model;
  model.params = params;
  model.feature_order.assign(FeatureVector::names().begin(),
                             FeatureVector::names().end());
  model.training_fingerprint = fingerprint(data, params);
  model.trees.reserve(params.n_trees);

  // out-of-bag votes: [sample] -> (minke votes, total votes)
  std::vector<std::pair<int, int>> oob(n, {0, 0});

  for (int t = 0; t < params.n_trees; ++t) {
    RngEngine rng = tree_engine(params.seed, t);
    std::vector<int> bootstrap(n);
    std::vector<std::uint8_t> in_bag(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = static_cast<std::size_t>(uniform_below(rng, n));
      bootstrap[i] = static_cast<int>(pick);
      in_bag[pick] = 1;
    }
    TreeBuilder builder(view, params, rng);
    model.trees.push_back(builder.build(std::move(bootstrap)));

    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      oob[i].first += model.trees.back().vote_minke(values[i]) ? 1 : 0;
      oob[i].second += 1;
    }
  }

  int oob_correct = 0;
  int oob_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (oob[i].second == 0) continue;
    const bool vote = 2 * oob[i].first > oob[i].second;
    oob_correct += vote == (labels[i] == 1) ? 1 : 0;
    ++oob_total;
  }
  if (oob_total > 0) {
    model.oob_accuracy = static_cast<double>(oob_correct) / oob_total;
  }
  return model;
}

Prediction predict(const ForestModel& model, const FeatureVector& fv,
                   double decision_threshold) {
  if (model.trees.empty()) throw data_error("model has no trees");
  const auto values = fv.values();
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw data_error("prediction input has non-finite features");
    }
  }
  int votes = 0;
  for (const auto& tree : model.trees) {
    votes += tree.vote_minke(values) ? 1 : 0;
  }
  Prediction p;
  p.score = static_cast<double>(votes) / static_cast<double>(
                                             model.trees.size());
  p.label =
      p.score >= decision_threshold ? EventLabel::minke : EventLabel::non_minke;
  return p;
}

std::string model_to_json(const ForestModel& model) {
  nlohmann::ordered_json j;
  j["version"] = kSchemaVersion;
  j["params"] = {{"n_trees", model.params.n_trees},
                 {"n_split_features", model.params.n_split_features},
                 {"max_depth", model.params.max_depth},
                 {"min_leaf", model.params.min_leaf},
                 {"seed", model.params.seed}};
  j["feature_order"] = model.feature_order;
  j["training_fingerprint"] = model.training_fingerprint;
  j["oob_accuracy"] = model.oob_accuracy;
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& tree : model.trees) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"count_minke", n.count_minke},
                       {"count_non", n.count_non}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump(2) + "\n";
}

ForestModel model_from_json(const std::string& text,
                            const std::string& context) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw data_error("corrupt-file: " + context + ": " + e.what());
  }
  try {
    if (!j.contains("version") || j["version"].get<int>() != kSchemaVersion) {
      throw schema_error("schema-version-mismatch: " + context);
    }
    ForestModel model;
    const auto& p = j.at("params");
    model.params.n_trees = p.at("n_trees").get<int>();
    model.params.n_split_features = p.at("n_split_features").get<int>();
    model.params.max_depth = p.at("max_depth").get<int>();
    model.params.min_leaf = p.at("min_leaf").get<int>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    model.feature_order =
        j.at("feature_order").get<std::vector<std::string>>();
    const auto& expected = FeatureVector::names();
    if (model.feature_order.size() != expected.size() ||
        !std::equal(expected.begin(), expected.end(),
                    model.feature_order.begin())) {
      throw schema_error(
          "schema-version-mismatch: feature order contract differs: " +
          context);
    }
    model.training_fingerprint =
        j.at("training_fingerprint").get<std::string>();
    model.oob_accuracy = j.at("oob_accuracy").get<double>();
    for (const auto& jt : j.at("trees")) {
      DecisionTree tree;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        n.count_minke = jn.at("count_minke").get<int>();
        n.count_non = jn.at("count_non").get<int>();
        if (n.feature >= kNumFeatures ||
            (n.feature < 0 && n.count_minke + n.count_non == 0)) {
          throw data_error("corrupt-file: invalid node in " + context);
        }
        tree.nodes.push_back(n);
      }
      if (tree.nodes.empty()) {
        throw data_error("corrupt-file: empty tree in " + context);
      }
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty()) {
      throw data_error("corrupt-file: no trees in " + context);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("corrupt-file: " + context + ": " + e.what());
  }
}

void save_model(const ForestModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write model file: " + path);
  out << model_to_json(model);
}

ForestModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text, path);
}

}  // namespace pulsekit
