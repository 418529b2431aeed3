// Random forest over feature vectors: bootstrap-resampled trees, per-node
// random feature subsets, Gini splits on midpoints. Fully deterministic for a
// given (data, params, seed) -- tree randomness derives from seed + tree
// index and ties break toward the lowest feature index, then the lowest
// threshold.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsekit/features.hpp"

namespace pulsekit {

struct ForestParams {
  int n_trees = 10;
  int n_split_features = 5;
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int count_minke = 0;   // training examples reaching a leaf
  int count_non = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  // true when the leaf reached by fv votes minke
  bool vote_minke(const std::array<double, 18>& values) const;
};

struct ForestModel {
  ForestParams params;
  std::vector<DecisionTree> trees;
  std::vector<std::string> feature_order;
  std::string training_fingerprint;  // hash of training data + params
  double oob_accuracy = -1.0;        // out-of-bag estimate, -1 when undefined
};

struct Prediction {
  EventLabel label = EventLabel::non_minke;
  double score = 0.0;  // fraction of trees voting minke
};

// Trains on labeled examples (both classes must be present; examples must be
// labeled and finite).
ForestModel train_forest(const std::vector<FeatureVector>& data,
                         const ForestParams& params);

// Majority vote; label is minke iff score >= decision_threshold.
Prediction predict(const ForestModel& model, const FeatureVector& fv,
                   double decision_threshold = 0.5);

// Structured-text (JSON) persistence. load_model validates the schema
// version and the feature-name contract.
void save_model(const ForestModel& model, const std::string& path);
ForestModel load_model(const std::string& path);

std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(const std::string& text,
                            const std::string& context);

}  // namespace pulsekit
