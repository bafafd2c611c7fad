#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace granusense::forest {

// feature == -1 marks a leaf; leaves carry the training-class histogram.
struct Node {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<int> counts;
};

// nodes[0] is the root. Routing: x[feature] <= threshold goes left.
struct Tree {
  std::vector<Node> nodes;
};

struct Model {
  int feature_count = 0;
  int class_count = 0;
  std::vector<Tree> trees;

  // Leaf vote of a single tree: histogram argmax, lower class on ties.
  int tree_vote(const Tree& tree, const Eigen::VectorXd& x) const;
  // Majority over tree votes, lower class on ties.
  int predict(const Eigen::VectorXd& x) const;
};

struct TrainConfig {
  int tree_count = 100;
  int max_depth = 12;
  double bootstrap_ratio = 1.0;  // bootstrap size as a fraction of the set
  int features_per_node = 0;     // 0 picks ceil(sqrt(feature_count))
  int min_samples_split = 2;
};

// Bagged CART forest minimizing Gini impurity, thresholds at midpoints of
// consecutive distinct values. Candidate features are drawn per node
// without replacement. All randomness flows from the seed, and ties in the
// split search resolve by (impurity, feature, threshold), so equal seeds
// give identical forests. Splits compare feature values only by order, so
// strictly increasing per-feature rescaling keeps every training-point
// prediction unchanged.
Model train_classifier(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       int class_count, std::uint64_t seed,
                       const TrainConfig& config = {});

}  // namespace granusense::forest
