#pragma once

#include <functional>
#include <span>
#include <vector>

namespace simta {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  bool passed = false;
  std::vector<double> rel_err;  // per parameter index
};

/// Central finite differences against an analytic gradient. loss must be a
/// deterministic function of the parameter vector; it is evaluated at
/// params +/- h per coordinate. The relative error per coordinate is
/// |analytic - numeric| / max(1, |analytic| + |numeric|), which behaves as an
/// absolute error near zero and a relative one for large gradients.
GradCheckReport grad_check(const std::function<double(std::span<const double>)>& loss,
                           std::span<const double> params,
                           std::span<const double> analytic_grad,
                           double h, double tol);

}  // namespace simta
