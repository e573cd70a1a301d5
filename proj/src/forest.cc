#include "stylo/forest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "io_util.h"
#include "json.hpp"
#include "random_util.h"
#include "stylo/error.h"

namespace stylo {
namespace {

constexpr double kMinGain = 1e-12;

double gini2(std::size_t human, std::size_t gpt) {
  const double n = static_cast<double>(human + gpt);
  const double ph = static_cast<double>(human) / n;
  const double pg = static_cast<double>(gpt) / n;
  return 1.0 - (ph * ph + pg * pg);
}

std::size_t label_index(Source s) { return s == Source::kGpt ? 1 : 0; }

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params,
              std::size_t max_features, std::uint64_t seed,
              std::size_t tree_index)
      : data_(data),
        params_(params),
        max_features_(max_features),
        rng_(derive_seed(seed, tree_index)) {}

  DecisionTree grow() {
    std::vector<std::size_t> samples(data_.rows());
    for (auto& s : samples) s = uniform_index(rng_, data_.rows());
    build(samples, 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  int build(const std::vector<std::size_t>& samples, std::size_t depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::array<std::uint32_t, 2> counts{};
    for (const std::size_t s : samples) ++counts[label_index(data_.label(s))];
    nodes_[index].class_counts = counts;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool too_small = samples.size() < 2 * params_.min_samples_leaf;
    const bool too_deep = params_.max_depth && depth >= *params_.max_depth;
    if (pure || too_small || too_deep) return index;

    const Candidate best = find_split(samples, counts);
    if (best.feature < 0) return index;

    std::vector<std::size_t> left, right;
    for (const std::size_t s : samples) {
      (data_.at(s, static_cast<std::size_t>(best.feature)) <= best.threshold
           ? left
           : right)
          .push_back(s);
    }
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    TreeNode& node = nodes_[index];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  // Scans features in the order drawn for this node: the first
  // max_features are compared together (lowest index wins ties); if none of
  // them yields positive gain the remaining ones are tried one at a time.
  Candidate find_split(const std::vector<std::size_t>& samples,
                       const std::array<std::uint32_t, 2>& counts) {
    std::vector<std::size_t> order(data_.cols());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng_);
    const std::size_t first = std::min(max_features_, order.size());
    std::sort(order.begin(), order.begin() + static_cast<long>(first));

    const double parent = gini2(counts[0], counts[1]);
    Candidate best;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k >= first && best.feature >= 0) break;
      evaluate_feature(order[k], samples, parent, best);
    }
    return best;
  }

  void evaluate_feature(std::size_t feature,
                        const std::vector<std::size_t>& samples,
                        double parent_gini, Candidate& best) {
    scratch_.clear();
    for (const std::size_t s : samples) {
      scratch_.emplace_back(data_.at(s, feature), label_index(data_.label(s)));
    }
    std::sort(scratch_.begin(), scratch_.end());
    const std::size_t n = scratch_.size();
    std::array<std::size_t, 2> total{};
    for (const auto& [v, y] : scratch_) ++total[y];

    std::array<std::size_t, 2> left{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[scratch_[i].second];
      const double a = scratch_[i].first;
      const double b = scratch_[i + 1].first;
      if (!(a < b)) continue;
      const std::size_t n_left = i + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < params_.min_samples_leaf ||
          n_right < params_.min_samples_leaf) {
        continue;
      }
      const std::size_t rh = total[0] - left[0];
      const std::size_t rg = total[1] - left[1];
      const double weighted =
          (static_cast<double>(n_left) * gini2(left[0], left[1]) +
           static_cast<double>(n_right) * gini2(rh, rg)) /
          static_cast<double>(n);
      const double gain = parent_gini - weighted;
      if (gain <= kMinGain) continue;
      double threshold = a + (b - a) / 2.0;
      if (!(threshold < b)) threshold = a;
      if (best.feature < 0 || gain > best.gain) {
        best = {static_cast<int>(feature), threshold, gain};
      }
    }
  }

  const Dataset& data_;
  const ForestParams& params_;
  std::size_t max_features_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::size_t>> scratch_;
};

void check_binary_labels(const Dataset& data, const char* what) {
  if (data.count(Source::kGpt) == 0 || data.count(Source::kHuman) == 0) {
    throw PreconditionError(std::string(what) +
                            " needs at least one row of each class");
  }
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(
        row[static_cast<std::size_t>(node->feature)] <= node->threshold
            ? node->left
            : node->right)];
  }
  return *node;
}

std::vector<int> DecisionTree::split_features() const {
  std::vector<int> features;
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) features.push_back(n.feature);
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

void DecisionTree::validate(std::size_t feature_count) const {
  if (nodes_.empty()) throw PreconditionError("tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) {
      if (n.class_counts[0] + n.class_counts[1] == 0) {
        throw PreconditionError("tree leaf " + std::to_string(i) + " is empty");
      }
      continue;
    }
    if (static_cast<std::size_t>(n.feature) >= feature_count) {
      throw PreconditionError("tree node " + std::to_string(i) +
                              " splits on feature out of range");
    }
    for (const int child : {n.left, n.right}) {
      if (child <= static_cast<int>(i) ||
          child >= static_cast<int>(nodes_.size())) {
        throw PreconditionError("tree node " + std::to_string(i) +
                                " has an invalid child index");
      }
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) {
      throw PreconditionError("tree node " + std::to_string(i) +
                              " is not reachable exactly once");
    }
  }
}

SplitIndices stratified_split(const Dataset& data, double test_fraction,
                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw PreconditionError("test fraction must lie strictly between 0 and 1");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    by_class[label_index(data.label(i))].push_back(i);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw PreconditionError(
          std::string("class '") +
          std::string(to_string(c == 1 ? Source::kGpt : Source::kHuman)) +
          "' has fewer than 2 rows; cannot split");
    }
  }

  const double n = static_cast<double>(data.rows());
  const auto total_test = static_cast<std::size_t>(std::llround(n * test_fraction));
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * test_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += quota[c];
  }
  // Leftover rows: largest remainder, then larger class, then gpt.
  std::array<std::size_t, 2> order = {1, 0};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return by_class[a].size() > by_class[b].size();
  });
  for (std::size_t k = 0; assigned < total_test; k = (k + 1) % 2) {
    ++quota[order[k]];
    ++assigned;
  }
  for (std::size_t c = 0; c < 2; ++c) {
    quota[c] = std::clamp<std::size_t>(quota[c], 1, by_class[c].size() - 1);
  }

  Rng rng(derive_seed(seed, 0x5e1173ULL));
  SplitIndices split;
  for (std::size_t c = 0; c < 2; ++c) {
    auto members = by_class[c];
    shuffle(members, rng);
    split.test.insert(split.test.end(), members.begin(),
                      members.begin() + static_cast<long>(quota[c]));
    split.train.insert(split.train.end(),
                       members.begin() + static_cast<long>(quota[c]),
                       members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed) {
  const SplitIndices split = stratified_split(data, test_fraction, seed);
  return {data.subset(split.train), data.subset(split.test)};
}

double gini(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (const auto c : class_counts) total += c;
  if (total == 0) throw PreconditionError("gini of empty class counts");
  double sum = 0.0;
  for (const auto c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum += p * p;
  }
  return 1.0 - sum;
}

std::size_t default_max_features(std::size_t feature_count) {
  return static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(feature_count))));
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, std::uint64_t seed,
                                          std::size_t tree_index) {
  Rng rng(derive_seed(seed, tree_index));
  std::vector<std::size_t> sample(n);
  for (auto& s : sample) s = uniform_index(rng, n);
  return sample;
}

TrainedForest fit(const Dataset& train, const ForestParams& params,
                  std::uint64_t seed) {
  if (params.n_trees == 0) throw PreconditionError("n_trees must be positive");
  if (params.min_samples_leaf == 0) {
    throw PreconditionError("min_samples_leaf must be positive");
  }
  if (train.rows() < 2) throw PreconditionError("training set needs 2+ rows");
  if (train.cols() == 0) throw PreconditionError("training set has no features");
  check_binary_labels(train, "training set");

  TrainedForest forest;
  forest.feature_count = train.cols();
  forest.seed = seed;
  forest.params = params;
  forest.active_features = train.features();
  forest.trees.resize(params.n_trees);
  const std::size_t max_features = params.max_features == 0
                                       ? default_max_features(train.cols())
                                       : std::min(params.max_features, train.cols());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < params.n_trees;
         t = next.fetch_add(1)) {
      forest.trees[t] = TreeBuilder(train, params, max_features, seed, t).grow();
    }
  };
  std::size_t threads = params.threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : params.threads;
  threads = std::min(threads, params.n_trees);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return forest;
}

double predict_proba(const TrainedForest& forest, std::span<const double> row) {
  if (row.size() != forest.feature_count) {
    throw PreconditionError("row has " + std::to_string(row.size()) +
                            " features, forest expects " +
                            std::to_string(forest.feature_count));
  }
  std::size_t gpt = 0;
  for (const auto& tree : forest.trees) {
    if (tree.vote(row) == Source::kGpt) ++gpt;
  }
  return static_cast<double>(gpt) / static_cast<double>(forest.trees.size());
}

Source predict(const TrainedForest& forest, std::span<const double> row) {
  return predict_proba(forest, row) >= 0.5 ? Source::kGpt : Source::kHuman;
}

double accuracy(const TrainedForest& forest, const Dataset& data) {
  if (data.rows() == 0) throw PreconditionError("accuracy on an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (predict(forest, data.row(i)) == data.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows());
}

std::string serialize_forest(const TrainedForest& forest) {
  nlohmann::ordered_json j;
  j["format"] = "stylo-forest";
  j["version"] = kModelSchemaVersion;
  j["seed"] = forest.seed;
  j["filter"] = std::string(to_string(forest.filter));
  j["feature_count"] = forest.feature_count;
  auto& names = j["active_features"] = nlohmann::ordered_json::array();
  for (const Feature f : forest.active_features) {
    names.push_back(std::string(feature_name(f)));
  }
  auto& params = j["params"];
  params["n_trees"] = forest.params.n_trees;
  params["min_samples_leaf"] = forest.params.min_samples_leaf;
  params["max_features"] = forest.params.max_features;
  if (forest.params.max_depth) {
    params["max_depth"] = *forest.params.max_depth;
  } else {
    params["max_depth"] = nullptr;
  }
  j["oob_ignored"] = forest.oob_ignored;
  auto& split = j["split"];
  split["test_fraction"] = forest.split.test_fraction;
  split["seed"] = forest.split.seed;
  split["train_ids"] = forest.split.train_ids;
  split["test_ids"] = forest.split.test_ids;
  auto& trees = j["trees"] = nlohmann::ordered_json::array();
  for (const auto& tree : forest.trees) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes()) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right,
                       n.class_counts[0], n.class_counts[1]});
    }
    trees.push_back(std::move(nodes));
  }
  return j.dump() + "\n";
}

TrainedForest parse_forest(std::string_view content) {
  TrainedForest forest;
  try {
    const auto j = nlohmann::json::parse(content);
    if (j.at("format") != "stylo-forest") {
      throw IoError("model file: not a stylo forest");
    }
    if (j.at("version").get<int>() != kModelSchemaVersion) {
      throw IoError("model file: unsupported version");
    }
    forest.seed = j.at("seed").get<std::uint64_t>();
    const auto filter = parse_filter(j.at("filter").get<std::string>());
    if (!filter) throw IoError("model file: unknown filter");
    forest.filter = *filter;
    forest.feature_count = j.at("feature_count").get<std::size_t>();
    for (const auto& name : j.at("active_features")) {
      const auto f = parse_feature(name.get<std::string>());
      if (!f) throw IoError("model file: unknown feature name");
      forest.active_features.push_back(*f);
    }
    const auto& params = j.at("params");
    forest.params.n_trees = params.at("n_trees").get<std::size_t>();
    forest.params.min_samples_leaf =
        params.at("min_samples_leaf").get<std::size_t>();
    forest.params.max_features = params.at("max_features").get<std::size_t>();
    if (!params.at("max_depth").is_null()) {
      forest.params.max_depth = params.at("max_depth").get<std::size_t>();
    }
    forest.oob_ignored = j.at("oob_ignored").get<bool>();
    const auto& split = j.at("split");
    forest.split.test_fraction = split.at("test_fraction").get<double>();
    forest.split.seed = split.at("seed").get<std::uint64_t>();
    forest.split.train_ids = split.at("train_ids").get<std::vector<std::string>>();
    forest.split.test_ids = split.at("test_ids").get<std::vector<std::string>>();
    for (const auto& tree : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : tree) {
        TreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.class_counts = {n.at(4).get<std::uint32_t>(),
                             n.at(5).get<std::uint32_t>()};
        nodes.push_back(node);
      }
      forest.trees.emplace_back(std::move(nodes));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model file: ") + e.what());
  }
  if (forest.trees.empty()) throw IoError("model file: no trees");
  if (forest.active_features.size() != forest.feature_count) {
    throw IoError("model file: feature list does not match feature_count");
  }
  for (const auto& tree : forest.trees) {
    try {
      tree.validate(forest.feature_count);
    } catch (const PreconditionError& e) {
      throw IoError(std::string("model file: ") + e.what());
    }
  }
  return forest;
}

void save_forest(const TrainedForest& forest,
                 const std::filesystem::path& path) {
  write_text_file(path, serialize_forest(forest));
}

TrainedForest load_forest(const std::filesystem::path& path) {
  return parse_forest(read_text_file(path));
}

}  // namespace stylo
