#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dtseq/embed.hpp"
#include "dtseq/error.hpp"

namespace dtseq {

namespace {

// Row-stochastic conditional affinities whose entropy matches log(perplexity),
// by bisection on the Gaussian precision of each row.
std::vector<double> conditional_affinities(const std::vector<double>& dist2, std::size_t n, double perplexity) {
  std::vector<double> p(n * n, 0.0);
  const double target = std::log(perplexity);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    const double* d = &dist2[i * n];
    double* row = &p[i * n];
    for (int iter = 0; iter < 200; ++iter) {
      double min_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) min_d = std::min(min_d, d[j]);
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        row[j] = std::exp(-beta * (d[j] - min_d));
        sum += row[j];
        weighted += row[j] * (d[j] - min_d);
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
  }
  return p;
}

}  // namespace

Eigen::MatrixXd tsne_2d(const Eigen::MatrixXd& points, const TsneConfig& config, double* used_perplexity) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 4) throw Error(ErrorKind::InvalidInput, "t-SNE needs at least 4 points");
  const double perplexity = std::min(config.perplexity, static_cast<double>(n - 1) / 3.0);
  if (used_perplexity) *used_perplexity = perplexity;

  std::vector<double> dist2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).squaredNorm();
      dist2[i * n + j] = dist2[j * n + i] = v;
    }
  auto cond = conditional_affinities(dist2, n, perplexity);
  std::vector<double> p(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) / (2.0 * static_cast<double>(n)), 1e-12);

  // PCA start scaled to a standard deviation of 1e-4 on the first axis.
  Eigen::MatrixXd y = pca_2d(points);
  {
    const double sd = std::sqrt((y.col(0).array() - y.col(0).mean()).square().sum() / static_cast<double>(n));
    if (sd > 0) y *= 1e-4 / sd;
  }

  Eigen::MatrixXd update = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 2);
  Eigen::MatrixXd grad(static_cast<Eigen::Index>(n), 2);
  std::vector<double> num(n * n);
  for (int it = 0; it < config.iterations; ++it) {
    const bool early = it < config.exaggeration_iterations;
    const double exaggeration = early ? config.early_exaggeration : 1.0;
    const double momentum = early ? 0.5 : 0.8;

    double sum_num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y(static_cast<Eigen::Index>(i), 0) - y(static_cast<Eigen::Index>(j), 0);
        const double dy = y(static_cast<Eigen::Index>(i), 1) - y(static_cast<Eigen::Index>(j), 1);
        const double v = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = v;
        sum_num += 2.0 * v;
      }
    }
    grad.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto jj = static_cast<Eigen::Index>(j);
        const double q = std::max(num[i * n + j] / sum_num, 1e-12);
        const double mult = (exaggeration * p[i * n + j] - q) * num[i * n + j];
        grad(ii, 0) += 4.0 * mult * (y(ii, 0) - y(jj, 0));
        grad(ii, 1) += 4.0 * mult * (y(ii, 1) - y(jj, 1));
      }
    }
    for (Eigen::Index i = 0; i < grad.rows(); ++i)
      for (Eigen::Index c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0) == (update(i, c) > 0);
        gains(i, c) = std::max(same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2, 0.01);
        update(i, c) = momentum * update(i, c) - config.learning_rate * gains(i, c) * grad(i, c);
        y(i, c) += update(i, c);
      }
    y.rowwise() -= y.colwise().mean();
  }
  return y;
}

}  // namespace dtseq
