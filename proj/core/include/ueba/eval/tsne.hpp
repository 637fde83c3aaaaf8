#pragma once

#include <cstdint>
#include <vector>

#include "ueba/matrix.hpp"

namespace ueba::eval {

struct TsneConfig {
  std::size_t output_dim = 2;
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double learning_rate = 200.0;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;  // from exaggeration_iterations onward
  std::uint64_t seed = 0;

  void validate(std::size_t n) const;
};

struct Embedding2D {
  Matrix points;                // n x output_dim
  double final_kl = 0.0;
  std::vector<double> kl_trace;  // KL against the unexaggerated P, per iteration
};

/// Exact t-SNE: full pairwise affinities, per-point bandwidths found by
/// bisection so the conditional perplexity matches the target (tolerance 1e-5,
/// at most 50 steps; unreachable targets raise an error naming the row),
/// symmetrized P, Student-t Q with one degree of freedom, gradient descent
/// with early exaggeration and the momentum switch.
Embedding2D tsne(const Matrix& X, const TsneConfig& cfg);

/// Exposed for testing: conditional probabilities p_{j|i} for row i given a
/// precision beta, over squared distances d2.
void conditional_probabilities(const std::vector<double>& d2, std::size_t self, double beta,
                               std::vector<double>& p_out, double* entropy_out);

}  // namespace ueba::eval
