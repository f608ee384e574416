#include "simta/losses.hpp"

#include <cmath>
#include <string>

#include "simta/error.hpp"

namespace simta {

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mse_loss");
  const double n = static_cast<double>(pred.size());
  LossResult res;
  res.grad = Matrix(pred.rows(), pred.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double d = pred.data()[i] - target.data()[i];
    sum += d * d;
    res.grad.data()[i] = 2.0 * d / n;
  }
  res.value = sum / n;
  return res;
}

LossResult cross_entropy_loss(const Matrix& logits, const std::vector<int>& labels) {
  if (logits.cols() != 2)
    throw DimensionError("cross_entropy_loss: expected Nx2 logits, got " +
                         logits.shape_str());
  if (logits.rows() != labels.size())
    throw DimensionError("cross_entropy_loss: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(logits.rows()) + " rows");
  const double n = static_cast<double>(logits.rows());
  LossResult res;
  res.grad = Matrix(logits.rows(), 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    int y = labels[i];
    if (y != 0 && y != 1)
      throw DataError("cross_entropy_loss: label " + std::to_string(y) +
                      " at row " + std::to_string(i) + " is not binary");
    double a = logits(i, 0), b = logits(i, 1);
    double m = a > b ? a : b;
    double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    sum += lse - logits(i, static_cast<std::size_t>(y));
    double p0 = std::exp(a - lse);
    double p1 = std::exp(b - lse);
    res.grad(i, 0) = (p0 - (y == 0 ? 1.0 : 0.0)) / n;
    res.grad(i, 1) = (p1 - (y == 1 ? 1.0 : 0.0)) / n;
  }
  res.value = sum / n;
  return res;
}

}  // namespace simta
