#include "simta/activations.hpp"

#include <cmath>
#include <limits>

#include "simta/error.hpp"

namespace simta {

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw DataError("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

namespace {

template <typename F>
Matrix map(const Matrix& x, F f) {
  Matrix out = x;
  for (double& v : out) v = f(v);
  return out;
}

}  // namespace

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  // log(1 + e^x) without overflow for large |x|.
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

Matrix relu(const Matrix& x) {
  return map(x, [](double v) { return v > 0.0 ? v : 0.0; });
}
Matrix relu_deriv(const Matrix& x) {
  return map(x, [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}
Matrix tanh_act(const Matrix& x) {
  return map(x, [](double v) { return std::tanh(v); });
}
Matrix tanh_deriv(const Matrix& x) {
  return map(x, [](double v) {
    double t = std::tanh(v);
    return 1.0 - t * t;
  });
}
Matrix sigmoid(const Matrix& x) {
  return map(x, sigmoid_scalar);
}
Matrix sigmoid_deriv(const Matrix& x) {
  return map(x, [](double v) {
    double s = sigmoid_scalar(v);
    return s * (1.0 - s);
  });
}

Matrix apply_activation(Activation a, const Matrix& x) {
  switch (a) {
    case Activation::Relu: return relu(x);
    case Activation::Tanh: return tanh_act(x);
    case Activation::Sigmoid: return sigmoid(x);
  }
  throw NumericError("bad activation enum");
}

Matrix apply_activation_deriv(Activation a, const Matrix& x) {
  switch (a) {
    case Activation::Relu: return relu_deriv(x);
    case Activation::Tanh: return tanh_deriv(x);
    case Activation::Sigmoid: return sigmoid_deriv(x);
  }
  throw NumericError("bad activation enum");
}

Matrix softmax_rows(const Matrix& a, const Matrix& mask) {
  require_same_shape(a, mask, "softmax_rows");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (mask(i, j) != 0.0 && a(i, j) > row_max) row_max = a(i, j);
    if (!std::isfinite(row_max))
      throw NumericError("softmax_rows: fully masked row " + std::to_string(i));
    double denom = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (mask(i, j) == 0.0) continue;
      out(i, j) = std::exp(a(i, j) - row_max);
      denom += out(i, j);
    }
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (mask(i, j) != 0.0) out(i, j) /= denom;
  }
  return out;
}

}  // namespace simta
