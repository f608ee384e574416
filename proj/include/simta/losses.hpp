#pragma once

#include <vector>

#include "simta/matrix.hpp"

namespace simta {

struct LossResult {
  double value = 0.0;
  Matrix grad;  // d value / d first argument
};

/// Mean of squared differences over all entries; grad = 2 (pred - target) / n.
LossResult mse_loss(const Matrix& pred, const Matrix& target);

/// Two-class cross entropy. logits is Nx2 (scores per class), labels in {0,1}.
/// Value is the mean negative log softmax probability of the true class;
/// grad is (softmax - one_hot) / N.
LossResult cross_entropy_loss(const Matrix& logits, const std::vector<int>& labels);

}  // namespace simta
