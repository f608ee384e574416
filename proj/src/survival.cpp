#include "simta/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "simta/error.hpp"

namespace simta {

std::vector<RiskGroup> stratify(std::span<const double> probabilities, double cutoff) {
  std::vector<RiskGroup> out;
  out.reserve(probabilities.size());
  for (double p : probabilities)
    out.push_back(p >= cutoff ? RiskGroup::Low : RiskGroup::High);
  return out;
}

KmCurve km_curve(std::span<const SurvivalSample> samples) {
  if (samples.empty()) throw DataError("km_curve: no samples");
  for (const auto& s : samples)
    if (s.duration < 0.0) throw DataError("km_curve: negative duration");

  std::set<double> event_times;
  for (const auto& s : samples)
    if (s.event) event_times.insert(s.duration);

  KmCurve curve;
  double survival = 1.0;
  for (double t : event_times) {
    std::size_t at_risk = 0, events = 0;
    for (const auto& s : samples) {
      if (s.duration >= t) ++at_risk;
      if (s.event && s.duration == t) ++events;
    }
    survival *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
    curve.points.push_back({t, survival, at_risk, events});
  }
  return curve;
}

double km_survival_at(const KmCurve& curve, double t) {
  double s = 1.0;
  for (const auto& p : curve.points) {
    if (p.time > t) break;
    s = p.survival;
  }
  return s;
}

namespace {

// Series expansion of P(a, x), valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) by modified Lentz, valid for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw NumericError("regularized_gamma_p: a must be > 0");
  if (x < 0.0) throw NumericError("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_1df_upper_tail(double x) {
  if (x < 0.0) throw NumericError("chi_square_1df_upper_tail: negative statistic");
  return 1.0 - regularized_gamma_p(0.5, x / 2.0);
}

LogrankResult logrank_test(std::span<const SurvivalSample> group_a,
                           std::span<const SurvivalSample> group_b) {
  if (group_a.empty() || group_b.empty())
    throw DataError("logrank_test: both groups must be non-empty");

  std::set<double> event_times;
  for (const auto& s : group_a)
    if (s.event) event_times.insert(s.duration);
  for (const auto& s : group_b)
    if (s.event) event_times.insert(s.duration);
  if (event_times.empty())
    throw DataError("logrank_test: no events in either group");

  double observed_minus_expected = 0.0;
  double variance = 0.0;
  for (double t : event_times) {
    double n1 = 0, n2 = 0, d1 = 0, d2 = 0;
    for (const auto& s : group_a) {
      if (s.duration >= t) ++n1;
      if (s.event && s.duration == t) ++d1;
    }
    for (const auto& s : group_b) {
      if (s.duration >= t) ++n2;
      if (s.event && s.duration == t) ++d2;
    }
    const double n = n1 + n2;
    const double d = d1 + d2;
    if (n < 2.0) continue;
    observed_minus_expected += d1 - d * n1 / n;
    variance += d * (n1 / n) * (n2 / n) * (n - d) / (n - 1.0);
  }

  LogrankResult res;
  if (variance <= 0.0) {
    res.chi_square = 0.0;
    res.p_value = 1.0;
    return res;
  }
  res.chi_square = observed_minus_expected * observed_minus_expected / variance;
  res.p_value = chi_square_1df_upper_tail(res.chi_square);
  return res;
}

}  // namespace simta
