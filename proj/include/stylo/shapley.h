#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stylo/dataset.h"
#include "stylo/forest.h"

namespace stylo {

inline constexpr std::size_t kMaxShapleyFeatures = 16;
inline constexpr std::size_t kDefaultBackgroundRows = 64;

// Reference rows used to fill in features outside a coalition.
class BackgroundSet {
 public:
  BackgroundSet() = default;
  BackgroundSet(std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return cols_ == 0 ? 0 : values_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }

 private:
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Up to max_rows training rows chosen by seed, kept in dataset order. All
// rows when the set is small enough.
BackgroundSet make_background(const Dataset& train, std::uint64_t seed,
                              std::size_t max_rows = kDefaultBackgroundRows);

struct Attribution {
  std::string instance_id;
  double base_value = 0.0;
  double prediction = 0.0;
  // One entry per active feature; positive values push toward gpt.
  std::vector<double> per_feature;
};

// Bit i of `coalition` set means feature i takes the instance value.
// Mean over background rows of the forest's gpt vote fraction.
double coalition_value(const TrainedForest& forest,
                       std::span<const double> instance,
                       std::uint32_t coalition, const BackgroundSet& background);

// v(S) for all 2^n coalitions, indexed by bitmask. Agrees exactly with
// coalition_value().
std::vector<double> coalition_table(const TrainedForest& forest,
                                    std::span<const double> instance,
                                    const BackgroundSet& background);

// phi_i = sum over S without i of |S|!(n-|S|-1)!/n! (v(S+i) - v(S)).
std::vector<double> shapley_from_table(std::span<const double> table,
                                       std::size_t n);

Attribution shapley_values(const TrainedForest& forest,
                           std::span<const double> instance,
                           const BackgroundSet& background,
                           std::string instance_id = {});

// Explains every row of `instances`; rows are processed in parallel and the
// result keeps row order.
std::vector<Attribution> explain_all(const TrainedForest& forest,
                                     const Dataset& instances,
                                     const BackgroundSet& background,
                                     std::size_t threads = 0);

struct FeatureImportance {
  Feature feature = Feature::kParagraphSize;
  double mean_abs = 0.0;
  std::size_t rank = 0;  // 1 = most important
  // (phi, feature value) per instance.
  std::vector<std::pair<double, double>> points;
};

struct ImportanceSummary {
  // Sorted by rank.
  std::vector<FeatureImportance> ranked;
};

// Ranks features by mean |phi|; ties keep canonical feature order.
// `instances` must list the explained rows in the same order.
ImportanceSummary summarize(std::span<const Attribution> attributions,
                            const Dataset& instances);

}  // namespace stylo
