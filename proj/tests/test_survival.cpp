#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "simta/error.hpp"
#include "simta/rng.hpp"
#include "simta/survival.hpp"

using namespace simta;

TEST_CASE("stratify splits on the cutoff with >= going low-risk") {
  std::vector<double> probs{0.9, 0.1};
  auto groups = stratify(probs);
  CHECK(groups[0] == RiskGroup::Low);
  CHECK(groups[1] == RiskGroup::High);
  CHECK(stratify(std::vector<double>{0.5})[0] == RiskGroup::Low);  // boundary
}

TEST_CASE("all probabilities on one side leave a group empty downstream") {
  std::vector<double> probs{0.8, 0.9, 0.7};
  auto groups = stratify(probs);
  std::vector<SurvivalSample> low, high;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    SurvivalSample s{10.0 * (i + 1), true, groups[i]};
    (groups[i] == RiskGroup::Low ? low : high).push_back(s);
  }
  CHECK(high.empty());
  CHECK_THROWS_AS(logrank_test(low, high), DataError);
}

TEST_CASE("km with no events stays at one") {
  std::vector<SurvivalSample> samples{{5, false}, {7, false}, {11, false}};
  KmCurve curve = km_curve(samples);
  CHECK(curve.points.empty());
  CHECK(km_survival_at(curve, 100.0) == 1.0);
}

TEST_CASE("km hand fixture: event, censored, event") {
  std::vector<SurvivalSample> samples{{1, true}, {2, false}, {3, true}};
  KmCurve curve = km_curve(samples);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].time == 1.0);
  CHECK(curve.points[0].survival == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(curve.points[0].at_risk == 3);
  CHECK(curve.points[1].time == 3.0);
  CHECK(curve.points[1].survival == 0.0);
  CHECK(curve.points[1].at_risk == 1);
  CHECK(km_survival_at(curve, 0.5) == 1.0);
  CHECK(km_survival_at(curve, 2.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("km matches a from-scratch product oracle on random instances") {
  Rng rng(5);
  for (int it = 0; it < 25; ++it) {
    std::vector<SurvivalSample> samples;
    const std::size_t n = 3 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i)
      samples.push_back({std::floor(rng.uniform(0, 20)), rng.uniform() < 0.6});
    bool any_event = false;
    for (const auto& s : samples) any_event |= s.event;
    if (!any_event) samples[0].event = true;

    KmCurve curve = km_curve(samples);
    for (const auto& point : curve.points) {
      // independent full product at this time
      double prod = 1.0;
      std::vector<double> times;
      for (const auto& s : samples)
        if (s.event && s.duration <= point.time) times.push_back(s.duration);
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      for (double t : times) {
        double at_risk = 0, events = 0;
        for (const auto& s : samples) {
          if (s.duration >= t) ++at_risk;
          if (s.event && s.duration == t) ++events;
        }
        prod *= 1.0 - events / at_risk;
      }
      CHECK(point.survival == doctest::Approx(prod).epsilon(1e-12));
    }
    // monotone non-increasing, starts below 1
    double prev = 1.0;
    for (const auto& point : curve.points) {
      CHECK(point.survival <= prev + 1e-15);
      CHECK(point.survival >= 0.0);
      prev = point.survival;
    }
  }
}

TEST_CASE("km rejects empty input") {
  CHECK_THROWS_AS(km_curve(std::vector<SurvivalSample>{}), DataError);
}

TEST_CASE("logrank on identical groups is exactly null") {
  std::vector<SurvivalSample> g{{3, true}, {5, false}, {9, true}, {12, true}};
  LogrankResult res = logrank_test(g, g);
  CHECK(res.chi_square == 0.0);
  CHECK(res.p_value == 1.0);
}

TEST_CASE("chi-square(1) upper tail against the erfc oracle") {
  // For 1 df the tail is erfc(sqrt(x/2)), an independent closed form.
  for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 3.841, 6.635, 10.83, 20.0}) {
    const double oracle = std::erfc(std::sqrt(x / 2.0));
    CHECK(chi_square_1df_upper_tail(x) == doctest::Approx(oracle).epsilon(1e-10));
  }
  CHECK(chi_square_1df_upper_tail(3.841) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("strongly separated exponential groups are significant") {
  Rng rng(11);
  std::vector<SurvivalSample> fast, slow;
  for (int i = 0; i < 50; ++i) {
    fast.push_back({-std::log(1.0 - rng.uniform()) / 5.0, true, RiskGroup::High});
    slow.push_back({-std::log(1.0 - rng.uniform()) / 1.0, true, RiskGroup::Low});
  }
  LogrankResult res = logrank_test(fast, slow);
  CHECK(res.p_value < 0.01);
}

TEST_CASE("logrank is symmetric and rank-invariant") {
  Rng rng(13);
  std::vector<SurvivalSample> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back({rng.uniform(0, 50), rng.uniform() < 0.7});
    b.push_back({rng.uniform(0, 80), rng.uniform() < 0.7});
  }
  LogrankResult ab = logrank_test(a, b);
  LogrankResult ba = logrank_test(b, a);
  CHECK(ab.chi_square == ba.chi_square);
  CHECK(ab.p_value == ba.p_value);
  CHECK(ab.p_value >= 0.0);
  CHECK(ab.p_value <= 1.0);

  auto squared = [](std::vector<SurvivalSample> v) {
    for (auto& s : v) s.duration *= s.duration;
    return v;
  };
  LogrankResult sq = logrank_test(squared(a), squared(b));
  CHECK(sq.chi_square == doctest::Approx(ab.chi_square).epsilon(1e-12));
}

TEST_CASE("logrank error paths") {
  std::vector<SurvivalSample> some{{3, true}};
  std::vector<SurvivalSample> none;
  CHECK_THROWS_AS(logrank_test(some, none), DataError);
  std::vector<SurvivalSample> censored_a{{3, false}, {4, false}};
  std::vector<SurvivalSample> censored_b{{5, false}};
  CHECK_THROWS_AS(logrank_test(censored_a, censored_b), DataError);
}

TEST_CASE("incomplete gamma basics") {
  CHECK(regularized_gamma_p(0.5, 0.0) == 0.0);
  // P + Q = 1 across the series/continued-fraction switch
  for (double x : {0.2, 0.9, 1.4, 1.5, 1.6, 4.0, 30.0}) {
    const double p = regularized_gamma_p(0.5, x);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK_THROWS_AS(regularized_gamma_p(0.5, -1.0), NumericError);
}
