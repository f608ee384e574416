#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace simta {

enum class RiskGroup { High, Low };

struct SurvivalSample {
  double duration = 0.0;  // days, >= 0
  bool event = false;     // false = censored
  RiskGroup group = RiskGroup::High;
};

/// probability >= cutoff is a predicted responder -> low risk.
std::vector<RiskGroup> stratify(std::span<const double> probabilities,
                                double cutoff = 0.5);

struct KmPoint {
  double time = 0.0;
  double survival = 0.0;  // S after this event time
  std::size_t at_risk = 0;
  std::size_t events = 0;
};

/// Product-limit curve over distinct event times. With no events the curve
/// has no points and S stays 1. Ties: subjects censored at t are still at
/// risk for events at t.
struct KmCurve {
  std::vector<KmPoint> points;
};

KmCurve km_curve(std::span<const SurvivalSample> samples);

/// Step-function evaluation of the estimate.
double km_survival_at(const KmCurve& curve, double t);

struct LogrankResult {
  double chi_square = 0.0;
  double p_value = 1.0;
};

/// Two-group log-rank test: observed minus expected events across distinct
/// event times with the hypergeometric variance; p from the chi-square(1)
/// upper tail.
LogrankResult logrank_test(std::span<const SurvivalSample> group_a,
                           std::span<const SurvivalSample> group_b);

/// Regularized lower incomplete gamma P(a, x): series expansion for
/// x < a + 1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Upper tail of the chi-square distribution with 1 degree of freedom.
double chi_square_1df_upper_tail(double x);

}  // namespace simta
