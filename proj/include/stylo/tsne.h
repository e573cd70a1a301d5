#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stylo/dataset.h"

namespace stylo {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iters = 250;
  // Momentum is 0.5 before this iteration and 0.8 from it on.
  std::size_t momentum_switch = 250;
  std::uint64_t seed = 0;
};

inline constexpr double kTsneInitStddev = 1e-4;
inline constexpr double kTsnePerplexityTolerance = 1e-4;
inline constexpr std::size_t kTsneMaxCalibrationSteps = 50;
inline constexpr double kTsneProbabilityFloor = 1e-12;

struct Projection {
  std::vector<std::array<double, 2>> points;
  // KL(P || Q) before each update, against the unexaggerated P.
  std::vector<double> kl_trace;
  // Perplexity after clamping to the dataset size.
  double perplexity = 0.0;
};

struct RowCalibration {
  std::vector<double> p;  // conditional p_{j|i} over the given neighbours
  double beta = 0.0;      // Gaussian precision 1 / (2 sigma^2)
  double perplexity = 0.0;
  bool uniform_fallback = false;
};

// Searches the precision so that exp(H(p)) matches the target. Rows whose
// distances are all equal (duplicates included) get the uniform distribution.
RowCalibration calibrate_row(std::span<const double> squared_distances,
                             double target_perplexity);

// Perplexity actually used for n points: min(requested, (n - 1) / 3).
double clamp_perplexity(double requested, std::size_t n);

// Per-column z-scores; zero-variance columns become 0. Row-major.
std::vector<double> standardize(const Dataset& data);

std::vector<double> squared_distances(std::span<const double> values,
                                      std::size_t n, std::size_t dim);

// Symmetrized joint probabilities, n x n row-major, zero diagonal, floored
// at kTsneProbabilityFloor and renormalized to sum 1.
std::vector<double> joint_probabilities(std::span<const double> sq_dist,
                                        std::size_t n, double perplexity);

// Student-t affinities of a 2-D layout (x0, y0, x1, y1, ...), sum 1.
std::vector<double> student_t_q(std::span<const double> layout, std::size_t n);

double kl_divergence(std::span<const double> p, std::span<const double> layout,
                     std::size_t n);

// Gradient of kl_divergence with respect to the layout.
std::vector<double> kl_gradient(std::span<const double> p,
                                std::span<const double> layout, std::size_t n);

// Embeds standardized rows; needs at least 4 rows.
Projection project(const Dataset& data, const TsneConfig& config);
Projection project_values(std::span<const double> values, std::size_t n,
                          std::size_t dim, const TsneConfig& config);

}  // namespace stylo
