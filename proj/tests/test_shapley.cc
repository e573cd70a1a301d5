#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "stylo/error.h"
#include "stylo/forest.h"
#include "stylo/shapley.h"
#include "check_util.h"
#include "test_support.h"

namespace stylo {
namespace {

TreeNode split(int feature, double threshold, int left, int right) {
  TreeNode n;
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return n;
}

TreeNode leaf(std::uint32_t human, std::uint32_t gpt) {
  TreeNode n;
  n.class_counts = {human, gpt};
  return n;
}

TrainedForest forest_of(std::size_t features, std::vector<std::vector<TreeNode>> trees) {
  TrainedForest f;
  f.feature_count = features;
  for (std::size_t i = 0; i < features; ++i) f.active_features.push_back(kAllFeatures[i]);
  for (auto& t : trees) f.trees.emplace_back(std::move(t));
  for (const auto& t : f.trees) t.validate(features);
  return f;
}

// Tree A: f0 <= 0.5 -> human, else gpt.
// Tree B: f1 <= 0.5 -> (f0 <= 0.5 -> human, else gpt), else gpt.
TrainedForest hand_forest() {
  return forest_of(2, {{split(0, 0.5, 1, 2), leaf(3, 0), leaf(0, 3)},
                       {split(1, 0.5, 1, 4), split(0, 0.5, 2, 3), leaf(3, 0), leaf(0, 3),
                        leaf(0, 3)}});
}

using testing::permutation_shapley;
using testing::random_dataset;

TEST(ShapleyHandTest, CoalitionValuesAndAttributions) {
  const auto forest = hand_forest();
  const std::vector<double> x = {1.0, 0.0};
  const BackgroundSet bg(2, {0.0, 0.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(coalition_value(forest, x, 0b00, bg), 0.25);
  EXPECT_DOUBLE_EQ(coalition_value(forest, x, 0b01, bg), 1.0);
  EXPECT_DOUBLE_EQ(coalition_value(forest, x, 0b10, bg), 0.0);
  EXPECT_DOUBLE_EQ(coalition_value(forest, x, 0b11, bg), 1.0);
  const auto a = shapley_values(forest, x, bg, "hand");
  EXPECT_EQ(a.instance_id, "hand");
  EXPECT_DOUBLE_EQ(a.base_value, 0.25);
  EXPECT_DOUBLE_EQ(a.prediction, 1.0);
  ASSERT_EQ(a.per_feature.size(), 2u);
  EXPECT_NEAR(a.per_feature[0], 0.875, 1e-15);
  EXPECT_NEAR(a.per_feature[1], -0.125, 1e-15);
}

TEST(ShapleyTest, TableMatchesDirectValueForEveryCoalition) {
  const Dataset d = random_dataset(80, 5, 3);
  const auto forest = fit(d, ForestParams{.n_trees = 30}, 8);
  const auto bg = make_background(d, 8, 16);
  for (std::size_t r = 0; r < 5; ++r) {
    const auto table = coalition_table(forest, d.row(r), bg);
    ASSERT_EQ(table.size(), 32u);
    for (std::uint32_t m = 0; m < 32; ++m) {
      EXPECT_EQ(table[m], coalition_value(forest, d.row(r), m, bg)) << "mask " << m;
    }
    EXPECT_EQ(table[31], predict_proba(forest, d.row(r)));
  }
}

TEST(ShapleyTest, MatchesPermutationAverageForSmallN) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const Dataset d = random_dataset(60, n, 10 + n);
    const auto forest = fit(d, ForestParams{.n_trees = 20}, n);
    const auto bg = make_background(d, n, 12);
    for (std::size_t r = 0; r < 6; ++r) {
      const auto a = shapley_values(forest, d.row(r), bg);
      const auto oracle = permutation_shapley(forest, d.row(r), bg);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(a.per_feature[i], oracle[i], 1e-9) << "n=" << n << " i=" << i;
      }
    }
  }
}

TEST(ShapleyTest, EfficiencyOnFittedForest) {
  const Dataset d = random_dataset(120, 8, 21);
  const auto [train, test] = split_train_test(d, 0.4, 21);
  const auto forest = fit(train, ForestParams{.n_trees = 40}, 21);
  const auto bg = make_background(train, 21);
  const auto attrs = explain_all(forest, test, bg, 3);
  ASSERT_EQ(attrs.size(), test.rows());
  for (std::size_t r = 0; r < attrs.size(); ++r) {
    EXPECT_EQ(attrs[r].instance_id, test.id(r));
    const double sum = std::accumulate(attrs[r].per_feature.begin(),
                                       attrs[r].per_feature.end(), attrs[r].base_value);
    EXPECT_NEAR(sum, attrs[r].prediction, 1e-6);
    EXPECT_EQ(attrs[r].prediction, predict_proba(forest, test.row(r)));
  }
}

TEST(ShapleyTest, UnusedFeatureGetsExactlyZero) {
  Dataset d = random_dataset(70, 4, 5);
  std::vector<double> values = d.values();
  for (std::size_t r = 0; r < d.rows(); ++r) values[r * 4 + 2] = 7.0;
  d = Dataset(d.features(), values, d.meta());
  const auto forest = fit(d, ForestParams{.n_trees = 25}, 5);
  for (const auto& t : forest.trees) {
    const auto used = t.split_features();
    EXPECT_EQ(std::count(used.begin(), used.end(), 2), 0);
  }
  std::vector<double> bgv;
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 4; ++c) bgv.push_back(c == 2 ? 0.1 * r : d.at(r, c));
  }
  const BackgroundSet bg(4, bgv);
  for (std::size_t r = 10; r < 20; ++r) {
    EXPECT_EQ(shapley_values(forest, d.row(r), bg).per_feature[2], 0.0);
  }
}

TEST(ShapleyTest, ConstantModelGivesZeroAttributions) {
  const auto forest = forest_of(3, {{leaf(1, 4)}, {leaf(2, 0)}});
  const BackgroundSet bg(3, {0, 0, 0, 1, 1, 1});
  const std::vector<double> x = {5, 5, 5};
  const auto a = shapley_values(forest, x, bg);
  EXPECT_DOUBLE_EQ(a.base_value, 0.5);
  for (double p : a.per_feature) EXPECT_EQ(p, 0.0);
  EXPECT_DOUBLE_EQ(coalition_value(forest, x, 0b010, bg), a.base_value);
}

TEST(ShapleyTest, DuplicatedColumnSharesCredit) {
  // Mirror trees over (f0, f2) and (f1, f2) where f1 duplicates f0.
  const auto dup = forest_of(3, {{split(0, 0.5, 1, 2), leaf(3, 0),
                                  split(2, 0.3, 3, 4), leaf(1, 2), leaf(0, 2)},
                                 {split(1, 0.5, 1, 2), leaf(3, 0),
                                  split(2, 0.3, 3, 4), leaf(1, 2), leaf(0, 2)}});
  const auto single = forest_of(2, {{split(0, 0.5, 1, 2), leaf(3, 0),
                                     split(1, 0.3, 3, 4), leaf(1, 2), leaf(0, 2)},
                                    {split(0, 0.5, 1, 2), leaf(3, 0),
                                     split(1, 0.3, 3, 4), leaf(1, 2), leaf(0, 2)}});
  const BackgroundSet bg3(3, {0.2, 0.2, 0.1, 0.9, 0.9, 0.1, 0.4, 0.4, 0.8});
  const BackgroundSet bg2(2, {0.2, 0.1, 0.9, 0.1, 0.4, 0.8});
  const std::vector<double> x3 = {0.7, 0.7, 0.6};
  const std::vector<double> x2 = {0.7, 0.6};
  const auto a = shapley_values(dup, x3, bg3);
  const auto b = shapley_values(single, x2, bg2);
  EXPECT_NEAR(a.per_feature[0], a.per_feature[1], 1e-9);
  EXPECT_NEAR(a.per_feature[0] + a.per_feature[1], b.per_feature[0], 1e-6);
  EXPECT_NEAR(a.per_feature[2], b.per_feature[1], 1e-9);
}

TEST(ShapleyTest, WeightsFromTable) {
  // Additive game: v(S) = sum of w_i over S gives phi_i = w_i.
  const std::vector<double> w = {0.3, -0.2, 0.5};
  std::vector<double> table(8);
  for (std::uint32_t m = 0; m < 8; ++m) {
    for (std::size_t i = 0; i < 3; ++i) table[m] += (m >> i & 1) ? w[i] : 0.0;
  }
  const auto phi = shapley_from_table(table, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(phi[i], w[i], 1e-15);
}

TEST(ShapleyTest, Preconditions) {
  const auto forest = hand_forest();
  const std::vector<double> x = {1.0, 0.0};
  EXPECT_THROW(coalition_value(forest, x, 0, BackgroundSet{}), PreconditionError);
  EXPECT_THROW(shapley_from_table(std::vector<double>(1u << 17), 17), PreconditionError);
  const std::vector<double> wrong = {1.0};
  EXPECT_THROW(shapley_values(forest, wrong, BackgroundSet(2, {0, 0})), PreconditionError);
}

TEST(BackgroundTest, SeededSubsample) {
  const Dataset d = random_dataset(100, 3, 1);
  const auto a = make_background(d, 4);
  const auto b = make_background(d, 4);
  EXPECT_EQ(a.rows(), 64u);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    EXPECT_TRUE(std::equal(a.row(r).begin(), a.row(r).end(), b.row(r).begin()));
  }
  EXPECT_EQ(make_background(d.subset(std::vector<std::size_t>{1, 2, 3}), 4).rows(), 3u);
}

TEST(SummaryTest, RanksByMeanAbsoluteWithCanonicalTies) {
  const Dataset d({Feature::kParagraphSize, Feature::kWordSize, Feature::kMtld},
                  {1, 2, 3, 4, 5, 6},
                  {{"a", Branch::kOther, Section::kAbstract, Source::kGpt},
                   {"b", Branch::kOther, Section::kAbstract, Source::kHuman}});
  const std::vector<Attribution> attrs = {{"a", 0.5, 0.9, {0.1, -0.3, 0.3}},
                                          {"b", 0.5, 0.1, {-0.1, 0.1, -0.1}}};
  const auto s = summarize(attrs, d);
  ASSERT_EQ(s.ranked.size(), 3u);
  EXPECT_EQ(s.ranked[0].feature, Feature::kWordSize);
  EXPECT_EQ(s.ranked[1].feature, Feature::kMtld);
  EXPECT_EQ(s.ranked[2].feature, Feature::kParagraphSize);
  EXPECT_NEAR(s.ranked[0].mean_abs, 0.2, 1e-15);
  EXPECT_EQ(s.ranked[0].rank, 1u);
  EXPECT_EQ(s.ranked[0].points[1], (std::pair<double, double>{0.1, 5.0}));
  const std::vector<Attribution> tied = {{"a", 0, 0, {0.2, -0.2, 0.2}},
                                         {"b", 0, 0, {0.2, 0.2, -0.2}}};
  const auto t = summarize(tied, d);
  EXPECT_EQ(t.ranked[0].feature, Feature::kParagraphSize);
  EXPECT_EQ(t.ranked[1].feature, Feature::kWordSize);
  EXPECT_EQ(t.ranked[2].feature, Feature::kMtld);
  const std::vector<Attribution> swapped = {attrs[1], attrs[0]};
  EXPECT_THROW(summarize(swapped, d), PreconditionError);
  EXPECT_THROW(summarize(std::vector<Attribution>{}, d), PreconditionError);
}

}  // namespace
}  // namespace stylo
