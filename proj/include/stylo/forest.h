#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylo/dataset.h"

namespace stylo {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t min_samples_leaf = 1;
  // Candidate features per node; 0 means ceil(sqrt(feature_count)).
  std::size_t max_features = 0;
  std::optional<std::size_t> max_depth;
  // Worker threads for training; 0 means hardware concurrency. Does not
  // affect the result.
  std::size_t threads = 0;
};

// Internal nodes route rows with value <= threshold to `left`. Leaves have
// feature == -1 and carry bootstrap class counts indexed by Source.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<std::uint32_t, 2> class_counts{};

  bool is_leaf() const { return feature < 0; }
  // Majority class; ties go to gpt.
  Source majority() const {
    return class_counts[1] >= class_counts[0] ? Source::kGpt : Source::kHuman;
  }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const TreeNode& leaf_for(std::span<const double> row) const;
  Source vote(std::span<const double> row) const {
    return leaf_for(row).majority();
  }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  // Feature indices the tree splits on.
  std::vector<int> split_features() const;
  // Throws PreconditionError unless the nodes form a binary tree rooted at
  // node 0 whose splits stay below feature_count and whose leaves are
  // non-empty.
  void validate(std::size_t feature_count) const;

 private:
  std::vector<TreeNode> nodes_;
};

struct SplitRecord {
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct TrainedForest {
  std::vector<DecisionTree> trees;
  std::size_t feature_count = 0;
  std::uint64_t seed = 0;
  bool oob_ignored = true;
  ForestParams params;
  std::vector<Feature> active_features;
  DatasetFilter filter = DatasetFilter::kCombined;
  SplitRecord split;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified split. The test set has round(n * fraction) rows; each class
// receives floor(n_c * fraction) and the leftover rows go to the classes
// with the largest fractional remainders (ties: larger class, then gpt).
// Indices come back in ascending order.
SplitIndices stratified_split(const Dataset& data, double test_fraction,
                              std::uint64_t seed);
std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed);

// 1 - sum (c_i / N)^2.
double gini(std::span<const std::size_t> class_counts);

std::size_t default_max_features(std::size_t feature_count);

// Bootstrap sample of size n for one tree; exposed so tests can replay it.
std::vector<std::size_t> bootstrap_sample(std::size_t n, std::uint64_t seed,
                                          std::size_t tree_index);

TrainedForest fit(const Dataset& train, const ForestParams& params,
                  std::uint64_t seed);

// Fraction of trees voting gpt.
double predict_proba(const TrainedForest& forest, std::span<const double> row);
Source predict(const TrainedForest& forest, std::span<const double> row);
double accuracy(const TrainedForest& forest, const Dataset& data);

inline constexpr int kModelSchemaVersion = 1;

std::string serialize_forest(const TrainedForest& forest);
TrainedForest parse_forest(std::string_view content);
void save_forest(const TrainedForest& forest, const std::filesystem::path& path);
TrainedForest load_forest(const std::filesystem::path& path);

}  // namespace stylo
