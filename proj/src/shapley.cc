#include "stylo/shapley.h"

#include <algorithm>
#include <bit>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "random_util.h"
#include "stylo/error.h"

namespace stylo {
namespace {

constexpr std::uint64_t kBackgroundStream = 0xb6c0ULL;

void check_inputs(const TrainedForest& forest, std::span<const double> instance,
                  const BackgroundSet& background) {
  if (background.rows() == 0) throw PreconditionError("background set is empty");
  if (forest.trees.empty()) throw PreconditionError("forest has no trees");
  if (instance.size() != forest.feature_count ||
      background.cols() != forest.feature_count) {
    throw PreconditionError("instance/background width does not match forest");
  }
  if (forest.feature_count > kMaxShapleyFeatures) {
    throw PreconditionError("exact Shapley supports at most " +
                            std::to_string(kMaxShapleyFeatures) + " features, got " +
                            std::to_string(forest.feature_count));
  }
}

// Walks one tree for a (instance, background row) pair. Nodes where the two
// rows disagree fork on whether the feature belongs to the coalition; each
// reached leaf adds its vote to every coalition consistent with the forks.
class PathCounter {
 public:
  PathCounter(std::span<const double> x, std::span<const double> b,
              std::uint32_t full, std::vector<std::uint32_t>& counts)
      : x_(x), b_(b), full_(full), counts_(counts) {}

  void visit(const DecisionTree& tree, int index, std::uint32_t in,
             std::uint32_t out) {
    const TreeNode& node = tree.nodes()[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
      if (node.majority() == Source::kGpt) add(in, out);
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const int x_side = x_[f] <= node.threshold ? node.left : node.right;
    const int b_side = b_[f] <= node.threshold ? node.left : node.right;
    if (x_side == b_side) {
      visit(tree, x_side, in, out);
      return;
    }
    const std::uint32_t bit = 1u << f;
    if (in & bit) {
      visit(tree, x_side, in, out);
    } else if (out & bit) {
      visit(tree, b_side, in, out);
    } else {
      visit(tree, x_side, in | bit, out);
      visit(tree, b_side, in, out | bit);
    }
  }

 private:
  void add(std::uint32_t in, std::uint32_t out) {
    const std::uint32_t free = full_ & ~(in | out);
    for (std::uint32_t sub = free;; sub = (sub - 1) & free) {
      ++counts_[in | sub];
      if (sub == 0) break;
    }
  }

  std::span<const double> x_;
  std::span<const double> b_;
  std::uint32_t full_;
  std::vector<std::uint32_t>& counts_;
};

}  // namespace

BackgroundSet::BackgroundSet(std::size_t cols, std::vector<double> values)
    : cols_(cols), values_(std::move(values)) {
  if (cols_ == 0 || values_.size() % cols_ != 0) {
    throw PreconditionError("background values do not form whole rows");
  }
}

BackgroundSet make_background(const Dataset& train, std::uint64_t seed,
                              std::size_t max_rows) {
  if (train.rows() == 0 || max_rows == 0) {
    throw PreconditionError("background set is empty");
  }
  std::vector<std::size_t> picked(train.rows());
  for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
  if (picked.size() > max_rows) {
    Rng rng(derive_seed(seed, kBackgroundStream));
    shuffle(picked, rng);
    picked.resize(max_rows);
    std::sort(picked.begin(), picked.end());
  }
  std::vector<double> values;
  values.reserve(picked.size() * train.cols());
  for (const std::size_t r : picked) {
    const auto row = train.row(r);
    values.insert(values.end(), row.begin(), row.end());
  }
  return BackgroundSet(train.cols(), std::move(values));
}

double coalition_value(const TrainedForest& forest,
                       std::span<const double> instance,
                       std::uint32_t coalition, const BackgroundSet& background) {
  check_inputs(forest, instance, background);
  std::vector<double> hybrid(forest.feature_count);
  std::uint64_t votes = 0;
  for (std::size_t r = 0; r < background.rows(); ++r) {
    const auto b = background.row(r);
    for (std::size_t f = 0; f < hybrid.size(); ++f) {
      hybrid[f] = (coalition >> f) & 1u ? instance[f] : b[f];
    }
    for (const auto& tree : forest.trees) {
      if (tree.vote(hybrid) == Source::kGpt) ++votes;
    }
  }
  return static_cast<double>(votes) /
         static_cast<double>(forest.trees.size() * background.rows());
}

std::vector<double> coalition_table(const TrainedForest& forest,
                                    std::span<const double> instance,
                                    const BackgroundSet& background) {
  check_inputs(forest, instance, background);
  const std::size_t n = forest.feature_count;
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<std::uint32_t> counts(std::size_t{1} << n, 0);
  for (std::size_t r = 0; r < background.rows(); ++r) {
    PathCounter counter(instance, background.row(r), full, counts);
    for (const auto& tree : forest.trees) counter.visit(tree, 0, 0, 0);
  }
  const double denom =
      static_cast<double>(forest.trees.size() * background.rows());
  std::vector<double> table(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    table[s] = static_cast<double>(counts[s]) / denom;
  }
  return table;
}

std::vector<double> shapley_from_table(std::span<const double> table,
                                       std::size_t n) {
  if (n > kMaxShapleyFeatures) {
    throw PreconditionError("too many features for exact Shapley");
  }
  if (table.size() != (std::size_t{1} << n)) {
    throw PreconditionError("coalition table must have 2^n entries");
  }
  // weight[s] = s!(n-s-1)!/n! = 1 / (n * C(n-1, s))
  std::vector<double> weight(n);
  double binom = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < table.size(); ++s) {
      if (s & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(s));
      phi[i] += weight[size] * (table[s | bit] - table[s]);
    }
  }
  return phi;
}

Attribution shapley_values(const TrainedForest& forest,
                           std::span<const double> instance,
                           const BackgroundSet& background,
                           std::string instance_id) {
  const auto table = coalition_table(forest, instance, background);
  Attribution a;
  a.instance_id = std::move(instance_id);
  a.base_value = table.front();
  a.prediction = predict_proba(forest, instance);
  a.per_feature = shapley_from_table(table, forest.feature_count);
  return a;
}

std::vector<Attribution> explain_all(const TrainedForest& forest,
                                     const Dataset& instances,
                                     const BackgroundSet& background,
                                     std::size_t threads) {
  std::vector<Attribution> out(instances.rows());
  if (out.empty()) return out;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_row = out.size();
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < out.size(); i = next.fetch_add(1)) {
      try {
        out[i] = shapley_values(forest, instances.row(i), background,
                                instances.id(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_row) {
          error_row = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, out.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ImportanceSummary summarize(std::span<const Attribution> attributions,
                            const Dataset& instances) {
  if (attributions.empty()) throw PreconditionError("no attributions to summarize");
  if (attributions.size() != instances.rows()) {
    throw PreconditionError("attributions and instances are not aligned");
  }
  const std::size_t n = instances.cols();
  std::vector<FeatureImportance> items(n);
  for (std::size_t f = 0; f < n; ++f) items[f].feature = instances.features()[f];
  for (std::size_t r = 0; r < attributions.size(); ++r) {
    const Attribution& a = attributions[r];
    if (a.per_feature.size() != n || a.instance_id != instances.id(r)) {
      throw PreconditionError("attribution " + std::to_string(r) +
                              " does not match instance '" + instances.id(r) + "'");
    }
    for (std::size_t f = 0; f < n; ++f) {
      items[f].mean_abs += std::abs(a.per_feature[f]);
      items[f].points.emplace_back(a.per_feature[f], instances.at(r, f));
    }
  }
  for (auto& item : items) {
    item.mean_abs /= static_cast<double>(attributions.size());
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) {
                     if (a.mean_abs != b.mean_abs) return a.mean_abs > b.mean_abs;
                     return index_of(a.feature) < index_of(b.feature);
                   });
  for (std::size_t i = 0; i < items.size(); ++i) items[i].rank = i + 1;
  return ImportanceSummary{std::move(items)};
}

}  // namespace stylo
