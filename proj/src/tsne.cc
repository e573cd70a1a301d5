#include "stylo/tsne.h"

#include <algorithm>
#include <cmath>

#include "random_util.h"
#include "stylo/error.h"

namespace stylo {
namespace {

constexpr double kLogBetaLow = -60.0;
constexpr double kLogBetaHigh = 60.0;
constexpr double kMinGain = 0.01;

void validate(const TsneConfig& c) {
  if (!(c.perplexity > 0.0)) throw PreconditionError("perplexity must be positive");
  if (c.iterations == 0) throw PreconditionError("iterations must be positive");
  if (!(c.learning_rate > 0.0)) {
    throw PreconditionError("learning rate must be positive");
  }
  if (!(c.early_exaggeration >= 1.0)) {
    throw PreconditionError("early exaggeration must be at least 1");
  }
}

// Returns exp(H) for precision beta; fills p.
double row_perplexity(std::span<const double> shifted, double beta,
                      std::vector<double>& p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    p[j] = std::exp(-beta * shifted[j]);
    sum += p[j];
  }
  double weighted = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    p[j] /= sum;
    weighted += p[j] * shifted[j];
  }
  return std::exp(std::log(sum) + beta * weighted);
}

}  // namespace

RowCalibration calibrate_row(std::span<const double> squared_distances,
                             double target_perplexity) {
  const std::size_t k = squared_distances.size();
  if (k == 0) throw PreconditionError("calibration needs at least 2 points");
  if (!(target_perplexity > 0.0)) {
    throw PreconditionError("perplexity must be positive");
  }
  RowCalibration out;
  out.p.assign(k, 0.0);
  const auto [lo_it, hi_it] =
      std::minmax_element(squared_distances.begin(), squared_distances.end());
  const double d_min = *lo_it;
  if (*hi_it == d_min) {
    std::fill(out.p.begin(), out.p.end(), 1.0 / static_cast<double>(k));
    out.perplexity = static_cast<double>(k);
    out.uniform_fallback = true;
    return out;
  }
  // Shifting by the minimum leaves p unchanged and keeps the sum >= 1.
  std::vector<double> shifted(k);
  for (std::size_t j = 0; j < k; ++j) shifted[j] = squared_distances[j] - d_min;

  double lo = kLogBetaLow;
  double hi = kLogBetaHigh;
  double log_beta = 0.0;
  double perp = row_perplexity(shifted, std::exp(log_beta), out.p);
  for (std::size_t step = 0; step < kTsneMaxCalibrationSteps; ++step) {
    if (std::abs(perp - target_perplexity) <= kTsnePerplexityTolerance) break;
    // Perplexity falls as beta grows.
    if (perp > target_perplexity) {
      lo = log_beta;
    } else {
      hi = log_beta;
    }
    log_beta = 0.5 * (lo + hi);
    perp = row_perplexity(shifted, std::exp(log_beta), out.p);
  }
  out.beta = std::exp(log_beta);
  out.perplexity = perp;
  return out;
}

double clamp_perplexity(double requested, std::size_t n) {
  if (n < 4) {
    throw PreconditionError("t-SNE needs at least 4 rows, got " + std::to_string(n));
  }
  return std::min(requested, static_cast<double>(n - 1) / 3.0);
}

std::vector<double> standardize(const Dataset& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  std::vector<double> out(data.values());
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += data.at(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = data.at(r, c) - mean;
      var += dev * dev;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
      out[r * d + c] = sd > 0.0 ? (data.at(r, c) - mean) / sd : 0.0;
    }
  }
  return out;
}

std::vector<double> squared_distances(std::span<const double> values,
                                      std::size_t n, std::size_t dim) {
  if (values.size() != n * dim) throw PreconditionError("value matrix size mismatch");
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = values[i * dim + c] - values[j * dim + c];
        s += diff * diff;
      }
      d[i * n + j] = s;
      d[j * n + i] = s;
    }
  }
  return d;
}

std::vector<double> joint_probabilities(std::span<const double> sq_dist,
                                        std::size_t n, double perplexity) {
  if (sq_dist.size() != n * n) throw PreconditionError("distance matrix size mismatch");
  if (n < 2) throw PreconditionError("calibration needs at least 2 points");
  std::vector<double> cond(n * n, 0.0);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0, k = 0; j < n; ++j) {
      if (j != i) row[k++] = sq_dist[i * n + j];
    }
    const RowCalibration cal = calibrate_row(row, perplexity);
    for (std::size_t j = 0, k = 0; j < n; ++j) {
      if (j != i) cond[i * n + j] = cal.p[k++];
    }
  }
  std::vector<double> p(n * n, 0.0);
  double total = 0.0;
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (cond[i * n + j] + cond[j * n + i]) / denom;
      p[i * n + j] = std::max(v, kTsneProbabilityFloor);
      total += p[i * n + j];
    }
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> student_t_q(std::span<const double> layout, std::size_t n) {
  std::vector<double> q(n * n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = layout[2 * i] - layout[2 * j];
      const double dy = layout[2 * i + 1] - layout[2 * j + 1];
      const double num = 1.0 / (1.0 + dx * dx + dy * dy);
      q[i * n + j] = num;
      q[j * n + i] = num;
      total += 2.0 * num;
    }
  }
  for (double& v : q) v /= total;
  return q;
}

double kl_divergence(std::span<const double> p, std::span<const double> layout,
                     std::size_t n) {
  const auto q = student_t_q(layout, n);
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) kl += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(kl, 0.0);
}

std::vector<double> kl_gradient(std::span<const double> p,
                                std::span<const double> layout, std::size_t n) {
  const auto q = student_t_q(layout, n);
  std::vector<double> num(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = layout[2 * i] - layout[2 * j];
      const double dy = layout[2 * i + 1] - layout[2 * j + 1];
      num[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
    }
  }
  std::vector<double> grad(2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double m = 4.0 * (p[i * n + j] - q[i * n + j]) * num[i * n + j];
      grad[2 * i] += m * (layout[2 * i] - layout[2 * j]);
      grad[2 * i + 1] += m * (layout[2 * i + 1] - layout[2 * j + 1]);
    }
  }
  return grad;
}

Projection project_values(std::span<const double> values, std::size_t n,
                          std::size_t dim, const TsneConfig& config) {
  validate(config);
  Projection out;
  out.perplexity = clamp_perplexity(config.perplexity, n);
  const auto p = joint_probabilities(squared_distances(values, n, dim), n,
                                     out.perplexity);

  Rng rng(config.seed);
  std::vector<double> y(2 * n);
  for (double& v : y) v = kTsneInitStddev * standard_normal(rng);
  std::vector<double> update(2 * n, 0.0);
  std::vector<double> gains(2 * n, 1.0);
  std::vector<double> p_exag(p.size());

  out.kl_trace.reserve(config.iterations);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const bool exaggerate = it < config.exaggeration_iters;
    const double alpha = exaggerate ? config.early_exaggeration : 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) p_exag[k] = alpha * p[k];

    out.kl_trace.push_back(kl_divergence(p, y, n));
    const auto grad = kl_gradient(p_exag, y, n);
    const double momentum = it < config.momentum_switch ? 0.5 : 0.8;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
      gains[k] = same_sign ? gains[k] * 0.8 : gains[k] + 0.2;
      gains[k] = std::max(gains[k], kMinGain);
      update[k] = momentum * update[k] - config.learning_rate * gains[k] * grad[k];
      y[k] += update[k];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }
  out.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.points[i] = {y[2 * i], y[2 * i + 1]};
  return out;
}

Projection project(const Dataset& data, const TsneConfig& config) {
  if (data.rows() < 4) {
    throw PreconditionError("t-SNE needs at least 4 rows, got " +
                            std::to_string(data.rows()));
  }
  return project_values(standardize(data), data.rows(), data.cols(), config);
}

}  // namespace stylo
