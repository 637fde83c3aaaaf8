#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ueba::nn {

enum class ActivationKind { Identity, Tanh, Elu };

// ELU uses alpha = 1 throughout.
inline double activate(ActivationKind k, double x) {
  switch (k) {
    case ActivationKind::Identity: return x;
    case ActivationKind::Tanh: return std::tanh(x);
    case ActivationKind::Elu: return x > 0.0 ? x : std::expm1(x);
  }
  throw std::logic_error("activate: unknown kind");
}

/// Derivative at the pre-activation value x.
inline double activate_deriv(ActivationKind k, double x) {
  switch (k) {
    case ActivationKind::Identity: return 1.0;
    case ActivationKind::Tanh: {
      double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::Elu: return x > 0.0 ? 1.0 : std::exp(x);
  }
  throw std::logic_error("activate_deriv: unknown kind");
}

inline std::string to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::Identity: return "identity";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Elu: return "elu";
  }
  throw std::logic_error("to_string: unknown activation");
}

inline ActivationKind activation_from_string(const std::string& s) {
  if (s == "identity") return ActivationKind::Identity;
  if (s == "tanh") return ActivationKind::Tanh;
  if (s == "elu") return ActivationKind::Elu;
  throw std::invalid_argument("unknown activation tag: " + s);
}

}  // namespace ueba::nn
