#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stylo/forest.h"
#include "stylo/shapley.h"

namespace stylo::testing {

// Shapley values as the mean marginal contribution over all n! orderings.
inline std::vector<double> permutation_shapley(const TrainedForest& forest,
                                               std::span<const double> x,
                                               const BackgroundSet& bg) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  std::size_t perms = 0;
  do {
    std::uint32_t mask = 0;
    double prev = coalition_value(forest, x, mask, bg);
    for (const auto i : order) {
      mask |= 1u << i;
      const double cur = coalition_value(forest, x, mask, bg);
      phi[i] += cur - prev;
      prev = cur;
    }
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& p : phi) p /= static_cast<double>(perms);
  return phi;
}

// Uniform features; the label follows a noisy linear score.
inline Dataset random_dataset(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> values;
  std::vector<DocumentMeta> meta;
  std::vector<Feature> features(kAllFeatures.begin(), kAllFeatures.begin() + cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double score = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = u(rng);
      values.push_back(v);
      score += (c % 2 ? -0.5 : 1.0) * v;
    }
    meta.push_back({"x" + std::to_string(r), Branch::kOther, Section::kAbstract,
                    score + 0.3 * u(rng) > 0.4 ? Source::kGpt : Source::kHuman});
  }
  return Dataset(features, std::move(values), std::move(meta));
}

inline std::vector<double> gaussian_points(std::size_t n, std::size_t dim,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n * dim);
  for (auto& x : v) x = g(rng);
  return v;
}

// Two clusters in 5-D, 12 units apart; the first half is cluster 0.
inline std::vector<double> two_blobs(std::size_t per_blob) {
  auto v = gaussian_points(2 * per_blob, 5, 17);
  for (std::size_t i = per_blob; i < 2 * per_blob; ++i) v[i * 5] += 12.0;
  return v;
}

inline double silhouette(const std::vector<std::array<double, 2>>& pts,
                         const std::vector<int>& label) {
  const std::size_t n = pts.size();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double same = 0, other = 0;
    std::size_t ns = 0, no = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
      if (label[i] == label[j]) {
        same += d;
        ++ns;
      } else {
        other += d;
        ++no;
      }
    }
    const double a = same / static_cast<double>(ns);
    const double b = other / static_cast<double>(no);
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

// Random prose-like text from a small vocabulary with mixed punctuation
// and paragraph breaks.
inline std::string fuzz_text(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {
      "the", "unhappy", "which", "model", "rewrite", "entropy", "x", "data",
      "interaction", "that", "is", "a", "when", "prefixes", "reasonable", "Q3",
      "state-of-the-art", "don't", "e.g.", "3.14", "Paris"};
  static const std::vector<std::string> marks = {" ", " ", " ", ", ", "; ", ". ",
                                                 "? ", "! ", ": ", "\n\n"};
  std::string text = "Start";
  const std::size_t len = 1 + rng() % 150;
  for (std::size_t i = 0; i < len; ++i) {
    text += marks[rng() % marks.size()];
    std::string w = vocab[rng() % vocab.size()];
    if (rng() % 4 == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    text += w;
  }
  return text + ".";
}

}  // namespace stylo::testing
