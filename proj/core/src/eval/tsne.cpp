#include "ueba/eval/tsne.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "ueba/rng.hpp"

namespace ueba::eval {

void TsneConfig::validate(std::size_t n) const {
  if (output_dim == 0) throw std::invalid_argument("TsneConfig: output_dim must be >= 1");
  if (iterations < 1) throw std::invalid_argument("TsneConfig: iterations must be >= 1");
  if (perplexity <= 0.0) throw std::invalid_argument("TsneConfig: perplexity must be > 0");
  if (static_cast<double>(n - 1) / 3.0 <= perplexity)
    throw std::invalid_argument("TsneConfig: need n >= 3*perplexity + 1 rows, have " +
                                std::to_string(n));
}

void conditional_probabilities(const std::vector<double>& d2, std::size_t self, double beta,
                               std::vector<double>& p_out, double* entropy_out) {
  const std::size_t n = d2.size();
  p_out.assign(n, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == self) continue;
    p_out[j] = std::exp(-beta * d2[j]);
    sum += p_out[j];
  }
  if (sum <= 0.0) sum = std::numeric_limits<double>::min();
  // H = log(sum) + beta * E[d2] in nats
  double h = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == self) continue;
    h += beta * d2[j] * p_out[j];
    p_out[j] /= sum;
  }
  h = h / sum + std::log(sum);
  if (entropy_out) *entropy_out = h;
}

namespace {

Matrix pairwise_squared_distances(const Matrix& X) {
  const std::size_t n = X.rows();
  Matrix d2(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < X.cols(); ++c) {
        double d = X(i, c) - X(j, c);
        acc += d * d;
      }
      d2(i, j) = acc;
      d2(j, i) = acc;
    }
  return d2;
}

/// Symmetrized joint P from per-point bisection on the Gaussian precision.
Matrix joint_probabilities(const Matrix& d2, double perplexity) {
  const std::size_t n = d2.rows();
  const double target_entropy = std::log(perplexity);
  constexpr double kTol = 1e-5;
  constexpr int kMaxSteps = 50;

  Matrix p_cond(n, n);
  std::vector<double> row_d2(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_d2[j] = d2(i, j);
    double beta = 1.0;
    double beta_min = -std::numeric_limits<double>::infinity();
    double beta_max = std::numeric_limits<double>::infinity();
    double h = 0.0;
    bool converged = false;
    for (int step = 0; step < kMaxSteps; ++step) {
      conditional_probabilities(row_d2, i, beta, p, &h);
      double diff = h - target_entropy;
      if (std::abs(diff) < kTol) {
        converged = true;
        break;
      }
      if (diff > 0.0) {
        beta_min = beta;
        beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
      } else {
        beta_max = beta;
        beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
      }
    }
    if (!converged)
      throw std::runtime_error("tsne: perplexity " + std::to_string(perplexity) +
                               " unreachable for row " + std::to_string(i) +
                               " (entropy " + std::to_string(h) + ")");
    for (std::size_t j = 0; j < n; ++j) p_cond(i, j) = p[j];
  }

  Matrix P(n, n);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      P(i, j) = (p_cond(i, j) + p_cond(j, i)) / denom;
  return P;
}

}  // namespace

Embedding2D tsne(const Matrix& X, const TsneConfig& cfg) {
  const std::size_t n = X.rows();
  cfg.validate(n);
  for (std::size_t i = 0; i < X.size(); ++i)
    if (!std::isfinite(X.data()[i])) throw std::invalid_argument("tsne: non-finite input");

  const Matrix d2 = pairwise_squared_distances(X);
  const Matrix P = joint_probabilities(d2, cfg.perplexity);
  const std::size_t dim = cfg.output_dim;

  Rng rng(derive_seed(cfg.seed, "tsne-init"));
  std::normal_distribution<double> init(0.0, 1e-2);
  Matrix Y(n, dim);
  for (std::size_t i = 0; i < Y.size(); ++i) Y.data()[i] = init(rng);

  Matrix increment(n, dim, 0.0);
  Matrix gains(n, dim, 1.0);
  Matrix grad(n, dim);
  Matrix num(n, n);

  Embedding2D out;
  out.kl_trace.reserve(cfg.iterations);

  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    const double exaggeration = iter < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const double momentum =
        iter < cfg.exaggeration_iterations ? cfg.momentum_initial : cfg.momentum_final;

    // Student-t numerators and normalizer
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          double d = Y(i, c) - Y(j, c);
          acc += d * d;
        }
        double v = 1.0 / (1.0 + acc);
        num(i, j) = v;
        num(j, i) = v;
        z += 2.0 * v;
      }
    }
    if (z <= 0.0) z = std::numeric_limits<double>::min();

    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < dim; ++c) grad(i, c) = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
        double p = P(i, j);
        if (p > 0.0) kl += p * std::log(p / q);
        double mult = (exaggeration * p - q) * num(i, j);
        for (std::size_t c = 0; c < dim; ++c) grad(i, c) += 4.0 * mult * (Y(i, c) - Y(j, c));
      }
    }
    out.kl_trace.push_back(kl);

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < dim; ++c) {
        bool same_sign = (grad(i, c) > 0.0) == (increment(i, c) > 0.0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        increment(i, c) =
            momentum * increment(i, c) - cfg.learning_rate * gains(i, c) * grad(i, c);
        Y(i, c) += increment(i, c);
      }

    // re-center
    for (std::size_t c = 0; c < dim; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += Y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) Y(i, c) -= mean;
    }
  }

  out.points = std::move(Y);
  out.final_kl = out.kl_trace.back();
  return out;
}

}  // namespace ueba::eval
