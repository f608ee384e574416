#include "simta/grad_check.hpp"

#include <cmath>

#include "simta/error.hpp"

namespace simta {

GradCheckReport grad_check(const std::function<double(std::span<const double>)>& loss,
                           std::span<const double> params,
                           std::span<const double> analytic_grad,
                           double h, double tol) {
  if (h <= 0.0) throw NumericError("grad_check: h must be > 0");
  if (params.size() != analytic_grad.size())
    throw DimensionError("grad_check: gradient length does not match parameters");

  std::vector<double> work(params.begin(), params.end());
  GradCheckReport report;
  report.rel_err.resize(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = work[i];
    work[i] = saved + h;
    const double up = loss(work);
    work[i] = saved - h;
    const double down = loss(work);
    work[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic_grad[i];
    const double denom = std::max(1.0, std::fabs(a) + std::fabs(numeric));
    const double rel = std::fabs(a - numeric) / denom;
    report.rel_err[i] = rel;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_index = i;
    }
  }
  report.passed = report.max_rel_err < tol;
  return report;
}

}  // namespace simta
