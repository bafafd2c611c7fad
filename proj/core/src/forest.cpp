#include "granusense/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "granusense/errors.hpp"
#include "granusense/rng.hpp"

namespace granusense::forest {

namespace {

// uniform() < 1 strictly, so the result stays below n.
size_t index_below(Rng& rng, size_t n) {
  return static_cast<size_t>(rng.uniform() * static_cast<double>(n));
}

int argmax_low_tie(const std::vector<int>& counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c)
    if (counts[static_cast<size_t>(c)] > counts[static_cast<size_t>(best)])
      best = c;
  return best;
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

double gini(const std::vector<int>& counts, int total) {
  double sum_sq = 0.0;
  for (int c : counts) sum_sq += static_cast<double>(c) * c;
  return 1.0 - sum_sq / (static_cast<double>(total) * total);
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const std::vector<int>& y,
              int class_count, const TrainConfig& config, Rng rng)
      : x_(x), y_(y), class_count_(class_count), config_(config), rng_(rng) {
    feature_scratch_.resize(static_cast<size_t>(x.cols()));
    std::iota(feature_scratch_.begin(), feature_scratch_.end(), 0);
  }

  Tree build(std::vector<int> sample_indices) {
    Tree tree;
    grow(tree, std::move(sample_indices), 0);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<int> idx, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::vector<int> counts(static_cast<size_t>(class_count_), 0);
    for (int i : idx) ++counts[static_cast<size_t>(y_[static_cast<size_t>(i)])];
    const bool pure =
        *std::max_element(counts.begin(), counts.end()) ==
        static_cast<int>(idx.size());

    Split split;
    if (!pure && depth < config_.max_depth &&
        static_cast<int>(idx.size()) >= config_.min_samples_split)
      split = best_split(idx, counts);

    if (!split.found) {
      tree.nodes[static_cast<size_t>(node_id)].counts = std::move(counts);
      return node_id;
    }

    std::vector<int> left_idx, right_idx;
    for (int i : idx) {
      if (x_(i, split.feature) <= split.threshold)
        left_idx.push_back(i);
      else
        right_idx.push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    const int left = grow(tree, std::move(left_idx), depth + 1);
    const int right = grow(tree, std::move(right_idx), depth + 1);
    Node& node = tree.nodes[static_cast<size_t>(node_id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }

  Split best_split(const std::vector<int>& idx,
                   const std::vector<int>& node_counts) {
    const int total = static_cast<int>(idx.size());
    int want = config_.features_per_node;
    if (want <= 0)
      want = static_cast<int>(
          std::ceil(std::sqrt(static_cast<double>(x_.cols()))));
    want = std::min<int>(want, static_cast<int>(x_.cols()));

    // Partial Fisher-Yates: the first `want` entries become the candidates.
    for (int k = 0; k < want; ++k) {
      const size_t j =
          static_cast<size_t>(k) +
          index_below(rng_, feature_scratch_.size() - static_cast<size_t>(k));
      std::swap(feature_scratch_[static_cast<size_t>(k)], feature_scratch_[j]);
    }
    std::vector<int> candidates(feature_scratch_.begin(),
                                feature_scratch_.begin() + want);
    std::sort(candidates.begin(), candidates.end());

    Split best;
    std::vector<std::pair<double, int>> vals;
    for (int f : candidates) {
      vals.clear();
      for (int i : idx)
        vals.emplace_back(x_(i, f), y_[static_cast<size_t>(i)]);
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::vector<int> left(static_cast<size_t>(class_count_), 0);
      std::vector<int> right = node_counts;
      for (int pos = 0; pos + 1 < total; ++pos) {
        const int cls = vals[static_cast<size_t>(pos)].second;
        ++left[static_cast<size_t>(cls)];
        --right[static_cast<size_t>(cls)];
        const double v = vals[static_cast<size_t>(pos)].first;
        const double v_next = vals[static_cast<size_t>(pos + 1)].first;
        if (!(v < v_next)) continue;

        const int nl = pos + 1;
        const int nr = total - nl;
        const double impurity =
            (nl * gini(left, nl) + nr * gini(right, nr)) / total;
        // Midpoints of adjacent representable values can round up to the
        // right value; clamp so `<= threshold` reproduces the partition.
        double threshold = v + (v_next - v) / 2.0;
        if (!(threshold < v_next)) threshold = v;

        const bool better =
            !best.found || impurity < best.impurity ||
            (impurity == best.impurity &&
             (f < best.feature ||
              (f == best.feature && threshold < best.threshold)));
        if (better) {
          best.found = true;
          best.feature = f;
          best.threshold = threshold;
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  int class_count_;
  TrainConfig config_;
  Rng rng_;
  std::vector<int> feature_scratch_;
};

}  // namespace

int Model::tree_vote(const Tree& tree, const Eigen::VectorXd& x) const {
  if (tree.nodes.empty()) throw DomainError("tree has no nodes");
  int at = 0;
  while (tree.nodes[static_cast<size_t>(at)].feature >= 0) {
    const Node& n = tree.nodes[static_cast<size_t>(at)];
    if (n.feature >= x.size())
      throw DomainError("input narrower than tree expects");
    at = (x(n.feature) <= n.threshold) ? n.left : n.right;
    if (at < 0 || at >= static_cast<int>(tree.nodes.size()))
      throw DomainError("malformed tree link");
  }
  return argmax_low_tie(tree.nodes[static_cast<size_t>(at)].counts);
}

int Model::predict(const Eigen::VectorXd& x) const {
  if (trees.empty()) throw DomainError("forest has no trees");
  if (x.size() != feature_count)
    throw DomainError("expected " + std::to_string(feature_count) +
                      " features, got " + std::to_string(x.size()));
  std::vector<int> ballot(static_cast<size_t>(class_count), 0);
  for (const Tree& t : trees) ++ballot[static_cast<size_t>(tree_vote(t, x))];
  return argmax_low_tie(ballot);
}

Model train_classifier(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       int class_count, std::uint64_t seed,
                       const TrainConfig& config) {
  const long n = x.rows();
  if (n == 0) throw DomainError("training set is empty");
  if (static_cast<long>(y.size()) != n)
    throw DomainError("inputs and labels must pair up");
  if (class_count <= 0) throw DomainError("class count must be positive");
  for (int label : y)
    if (label < 0 || label >= class_count)
      throw DomainError("label outside [0, class_count)");
  if (!x.allFinite()) throw DomainError("training data must be finite");
  if (config.tree_count <= 0 || config.max_depth <= 0 ||
      !(config.bootstrap_ratio > 0.0) || config.min_samples_split < 2)
    throw DomainError("forest config must be positive");

  Model model;
  model.feature_count = static_cast<int>(x.cols());
  model.class_count = class_count;
  model.trees.reserve(static_cast<size_t>(config.tree_count));

  Rng master(seed);
  const long boot = std::max<long>(
      1, std::llround(config.bootstrap_ratio * static_cast<double>(n)));
  for (int t = 0; t < config.tree_count; ++t) {
    Rng tree_rng = master.derive("tree-" + std::to_string(t));
    std::vector<int> sample;
    sample.reserve(static_cast<size_t>(boot));
    for (long i = 0; i < boot; ++i)
      sample.push_back(
          static_cast<int>(index_below(tree_rng, static_cast<size_t>(n))));
    TreeBuilder builder(x, y, class_count, config, tree_rng);
    model.trees.push_back(builder.build(std::move(sample)));
  }
  return model;
}

}  // namespace granusense::forest
