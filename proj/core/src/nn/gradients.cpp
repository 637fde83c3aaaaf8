#include "ueba/nn/gradients.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ueba::nn {

GradientSet GradientSet::zeros_like(const CompositionNet& net) {
  GradientSet g;
  g.layers.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    GradientSet::LayerGrad lg;
    lg.d_weights = Matrix(l.affine.out_dim(), l.affine.in_dim());
    lg.d_bias.assign(l.affine.out_dim(), 0.0);
    g.layers.push_back(std::move(lg));
  }
  return g;
}

namespace {

double l1_penalty(const CompositionNet& net, double l1_lambda) {
  if (l1_lambda == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& l : net.layers) {
    const double* w = l.affine.weights.data();
    for (std::size_t i = 0; i < l.affine.weights.size(); ++i) s += std::abs(w[i]);
  }
  return l1_lambda * s;
}

}  // namespace

double reconstruction_loss(const CompositionNet& net, const Matrix& batch, double l1_lambda) {
  if (batch.cols() != net.input_dim())
    throw std::invalid_argument("reconstruction_loss: batch width mismatch");
  const std::size_t out_dim = net.output_dim();
  double mse = 0.0;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    auto y = forward_composition(net, batch.row_vec(r));
    const double* x = batch.row(r);
    for (std::size_t i = 0; i < out_dim; ++i) {
      double d = y[i] - x[i];
      mse += d * d;
    }
  }
  if (batch.rows() > 0) mse /= static_cast<double>(batch.rows() * out_dim);
  return mse + l1_penalty(net, l1_lambda);
}

GradientSet gradients(const CompositionNet& net, const Matrix& batch, double l1_lambda,
                      double* loss_out) {
  net.validate();
  if (batch.cols() != net.input_dim())
    throw std::invalid_argument("gradients: batch width " + std::to_string(batch.cols()) +
                                " != network input width " + std::to_string(net.input_dim()));
  if (l1_lambda < 0.0) throw std::invalid_argument("gradients: l1_lambda must be >= 0");
  if (net.output_dim() != net.input_dim())
    throw std::invalid_argument("gradients: reconstruction loss needs output width == input width");

  GradientSet g = GradientSet::zeros_like(net);
  const std::size_t depth = net.layers.size();
  const std::size_t out_dim = net.output_dim();
  const double norm = batch.rows() > 0 ? 1.0 / static_cast<double>(batch.rows() * out_dim) : 0.0;
  double mse = 0.0;

  for (std::size_t r = 0; r < batch.rows(); ++r) {
    ForwardTrace t = forward_trace(net, batch.row_vec(r));
    const double* x = batch.row(r);

    // dL/da at the output, L = norm * sum (a - x)^2
    std::vector<double> delta(out_dim);
    for (std::size_t i = 0; i < out_dim; ++i) {
      double d = t.post[depth][i] - x[i];
      mse += d * d;
      delta[i] = 2.0 * norm * d;
    }

    for (std::size_t l = depth; l-- > 0;) {
      const auto& layer = net.layers[l];
      auto& lg = g.layers[l];
      const auto& h_prev = t.post[l];
      // delta currently holds dL/da^(l); fold in the activation derivative.
      for (std::size_t i = 0; i < layer.affine.out_dim(); ++i) {
        double dz = delta[i] * activate_deriv(layer.activations[i], t.pre[l][i]);
        if (!std::isfinite(dz))
          throw std::runtime_error("gradients: non-finite value at layer " + std::to_string(l));
        delta[i] = dz;
        lg.d_bias[i] += dz;
        double* dw = lg.d_weights.row(i);
        for (std::size_t j = 0; j < h_prev.size(); ++j) dw[j] += dz * h_prev[j];
      }
      if (l > 0) {
        std::vector<double> prev_delta(layer.affine.in_dim(), 0.0);
        for (std::size_t i = 0; i < layer.affine.out_dim(); ++i) {
          const double* w = layer.affine.weights.row(i);
          for (std::size_t j = 0; j < prev_delta.size(); ++j) prev_delta[j] += w[j] * delta[i];
        }
        delta = std::move(prev_delta);
      }
    }
  }

  if (l1_lambda > 0.0) {
    for (std::size_t l = 0; l < depth; ++l) {
      const Matrix& w = net.layers[l].affine.weights;
      Matrix& dw = g.layers[l].d_weights;
      for (std::size_t i = 0; i < w.size(); ++i) {
        double wi = w.data()[i];
        // subgradient 0 at exactly 0
        if (wi > 0.0)
          dw.data()[i] += l1_lambda;
        else if (wi < 0.0)
          dw.data()[i] -= l1_lambda;
      }
    }
  }

  if (loss_out) {
    double total = (batch.rows() > 0 ? mse * norm : 0.0) + l1_penalty(net, l1_lambda);
    *loss_out = total;
  }
  return g;
}

}  // namespace ueba::nn
