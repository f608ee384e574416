#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace simta {

struct AdamState {
  std::size_t step = 0;
  std::vector<double> m;  // first-moment accumulator, one per parameter
  std::vector<double> v;  // second-moment accumulator, entries >= 0
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t n, double lr_ = 1e-3)
      : m(n, 0.0), v(n, 0.0), lr(lr_) {}
};

/// One Adam update with bias correction. params and grads must match the
/// state's moment length; a non-finite gradient entry is a NumericError
/// naming the offending index.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace simta
