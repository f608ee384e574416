#pragma once

#include <string>

#include "simta/matrix.hpp"

namespace simta {

enum class Activation { Relu, Tanh, Sigmoid };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

Matrix relu(const Matrix& x);
Matrix relu_deriv(const Matrix& x);
Matrix tanh_act(const Matrix& x);
Matrix tanh_deriv(const Matrix& x);
Matrix sigmoid(const Matrix& x);
Matrix sigmoid_deriv(const Matrix& x);

/// Elementwise activation / derivative-at-x dispatch.
Matrix apply_activation(Activation a, const Matrix& x);
Matrix apply_activation_deriv(Activation a, const Matrix& x);

double sigmoid_scalar(double x);
double softplus(double x);

/// Row-wise masked softmax. mask entries are 1 (attend) or 0 (excluded, the
/// -inf positions); masked outputs are exactly 0 and each row of unmasked
/// entries is exp-normalized with row-max subtraction. A fully masked row is
/// a NumericError.
Matrix softmax_rows(const Matrix& a, const Matrix& mask);

}  // namespace simta
