#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "simta/cohort.hpp"
#include "simta/datagen.hpp"
#include "simta/error.hpp"
#include "simta/io_util.hpp"
#include "simta/rng.hpp"
#include "simta/training.hpp"

using namespace simta;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("degenerate constant series") {
  TrigSeriesSpec spec;
  spec.amplitude = {1.0};
  spec.omega = {0.0};
  spec.phase = {M_PI / 2.0};
  spec.offset = {0.0};
  spec.noise_level = 0.0;
  for (double t : {0.0, 1.0, 17.3, 400.0})
    CHECK(spec.mean_at(t) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("noise-free evaluation is deterministic") {
  Rng rng(3);
  auto series = gen_trig_series(rng, {.count = 1, .n_components = 10});
  const TrigSeriesSpec& spec = series[0].spec;
  CHECK(spec.mean_at(12.34) == spec.mean_at(12.34));
}

TEST_CASE("long-run sample mean approaches the sum of offsets") {
  Rng rng(7);
  TrigGenConfig config{.count = 1, .n_components = 10};
  auto series = gen_trig_series(rng, config);
  const TrigSeriesSpec& spec = series[0].spec;
  double offset_sum = 0.0;
  for (double b : spec.offset) offset_sum += b;

  Rng mc(11);
  const int n = 40000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = spec.sample_at(mc.uniform(0.0, 1000.0), mc);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double stdev = std::sqrt(sumsq / n - mean * mean);
  const double stderr_mean = stdev / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(mean - offset_sum) < 3.0 * stderr_mean + 1e-9);
}

TEST_CASE("generation is a pure function of seed and config") {
  TrigGenConfig config{.count = 50, .n_components = 10};
  Rng a(99), b(99);
  auto sa = gen_trig_series(a, config);
  auto sb = gen_trig_series(b, config);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].train == sb[i].train);
    for (std::size_t j = 0; j < sa[i].spec.components(); ++j) {
      CHECK(sa[i].spec.amplitude[j] == sb[i].spec.amplitude[j]);
      CHECK(sa[i].spec.omega[j] == sb[i].spec.omega[j]);
      CHECK(sa[i].spec.phase[j] == sb[i].spec.phase[j]);
      CHECK(sa[i].spec.offset[j] == sb[i].spec.offset[j]);
    }
  }
  std::size_t n_train = 0;
  for (const auto& s : sa) n_train += s.train ? 1 : 0;
  CHECK(n_train == 40);  // 80/20 split fixed at generation
}

TEST_CASE("sampled instances have the documented shape") {
  Rng rng(1);
  auto series = gen_trig_series(rng, {.count = 1});
  Rng sampler(2);
  SampledInstance inst = sample_instance(series[0].spec, sampler, 2.0);
  CHECK(inst.inputs.steps() == 10);
  CHECK(inst.target_times.size() == 3);
  CHECK(inst.target_values.size() == 3);
  for (std::size_t i = 1; i < 10; ++i)
    CHECK(inst.inputs.timestamps[i] > inst.inputs.timestamps[i - 1]);
  const double last = inst.inputs.timestamps.back();
  CHECK(inst.target_times[0] == last + 1.0);
  CHECK(inst.target_times[2] == last + 3.0);
}

TEST_CASE("input intervals are uniform on (0, I]") {
  Rng rng(5);
  auto series = gen_trig_series(rng, {.count = 1});
  Rng sampler(6);
  const double max_interval = 2.0;
  double sum = 0.0;
  int count = 0;
  for (int it = 0; it < 1200; ++it) {  // > 1e4 intervals
    SampledInstance inst = sample_instance(series[0].spec, sampler, max_interval);
    for (std::size_t i = 1; i < 10; ++i) {
      const double gap = inst.inputs.timestamps[i] - inst.inputs.timestamps[i - 1];
      CHECK(gap > 0.0);
      CHECK(gap <= max_interval);
      sum += gap;
      ++count;
    }
  }
  const double mean = sum / count;
  const double stderr_mean = max_interval / std::sqrt(12.0) / std::sqrt(count * 1.0);
  CHECK(std::fabs(mean - max_interval / 2.0) < 3.0 * stderr_mean + 1e-3);
}

TEST_CASE("noise-free targets equal the direct evaluation at the offsets") {
  Rng rng(9);
  TrigGenConfig config{.count = 1, .eta = 0.0};
  auto series = gen_trig_series(rng, config);
  Rng sampler(10);
  SampledInstance inst = sample_instance(series[0].spec, sampler, 1.5);
  for (int k = 0; k < 3; ++k)
    CHECK(inst.target_values[k] ==
          doctest::Approx(series[0].spec.mean_at(inst.target_times[k])).epsilon(1e-15));
}

TEST_CASE("benchmark files round-trip losslessly") {
  Rng rng(13);
  auto series = gen_trig_series(rng, {.count = 20});
  auto path = temp_path("simta_bench_roundtrip.jsonl");
  save_benchmark(series, path);
  auto loaded = load_benchmark(path);
  REQUIRE(loaded.size() == series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(loaded[i].train == series[i].train);
    for (std::size_t j = 0; j < series[i].spec.components(); ++j)
      CHECK(loaded[i].spec.omega[j] == series[i].spec.omega[j]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("cohort with zero planted weights is label noise") {
  Rng rng(17);
  CohortGenConfig config;
  config.effect.w_lab = 0.0;
  config.effect.w_imaging = 0.0;
  config.effect.w_static = 0.0;
  Cohort cohort = gen_mia_cohort(rng, config);

  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& rec : cohort.subjects)
    for (const auto& a : rec.assessments) {
      scores.push_back(a.score);
      labels.push_back(a.label);
    }
  REQUIRE(scores.size() >= 300);
  double positive = 0.0;
  for (int y : labels) positive += y;
  const double rate = positive / labels.size();
  CHECK(rate > 0.42);
  CHECK(rate < 0.58);
  // all planted scores are zero, so the oracle scorer is pure ties
  CHECK(auc(scores, labels) == 0.5);
}

TEST_CASE("fold assignment partitions the subjects evenly") {
  Rng rng(19);
  Cohort cohort = gen_mia_cohort(rng, CohortGenConfig{});
  REQUIRE(cohort.subjects.size() == 99);
  REQUIRE(cohort.fold.size() == 99);
  std::size_t counts[3] = {0, 0, 0};
  for (int f : cohort.fold) {
    REQUIRE(f >= 0);
    REQUIRE(f < 3);
    ++counts[f];
  }
  CHECK(counts[0] == 33);
  CHECK(counts[1] == 33);
  CHECK(counts[2] == 33);
}

TEST_CASE("planted-score oracle separates the labels") {
  Rng rng(23);
  Cohort cohort = gen_mia_cohort(rng, CohortGenConfig{});
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& rec : cohort.subjects)
    for (const auto& a : rec.assessments) {
      REQUIRE(a.has_score);
      scores.push_back(a.score);
      labels.push_back(a.label);
    }
  CHECK(auc(scores, labels) >= 0.9);
}

TEST_CASE("cohort generation is reproducible and structurally sound") {
  CohortGenConfig config;
  config.n_subjects = 12;
  Rng a(31), b(31);
  Cohort ca = gen_mia_cohort(a, config);
  Cohort cb = gen_mia_cohort(b, config);
  REQUIRE(ca.subjects.size() == cb.subjects.size());
  for (std::size_t s = 0; s < ca.subjects.size(); ++s) {
    const auto& ra = ca.subjects[s];
    const auto& rb = cb.subjects[s];
    CHECK(ra.statics == rb.statics);
    for (const auto& [name, series] : ra.modalities) {
      series.validate();
      const auto& other = rb.modalities.at(name);
      CHECK(series.timestamps == other.timestamps);
      CHECK(max_abs_diff(series.values, other.values) == 0.0);
    }
    CHECK(ra.survival.at("os").duration == rb.survival.at("os").duration);
  }
}

TEST_CASE("cohort files round-trip losslessly") {
  Rng rng(37);
  CohortGenConfig config;
  config.n_subjects = 8;
  Cohort cohort = gen_mia_cohort(rng, config);
  auto path = temp_path("simta_cohort_roundtrip.jsonl");
  save_cohort(cohort, path);
  Cohort loaded = load_cohort(path);
  REQUIRE(loaded.subjects.size() == cohort.subjects.size());
  CHECK(loaded.fold == cohort.fold);
  for (std::size_t s = 0; s < cohort.subjects.size(); ++s) {
    const auto& orig = cohort.subjects[s];
    const auto& got = loaded.subjects[s];
    CHECK(got.id == orig.id);
    CHECK(got.statics == orig.statics);
    REQUIRE(got.modalities.size() == orig.modalities.size());
    for (const auto& [name, series] : orig.modalities) {
      const auto& other = got.modalities.at(name);
      CHECK(series.timestamps == other.timestamps);
      CHECK(max_abs_diff(series.values, other.values) == 0.0);
    }
    CHECK(got.interventions.timestamps == orig.interventions.timestamps);
    REQUIRE(got.assessments.size() == orig.assessments.size());
    for (std::size_t i = 0; i < orig.assessments.size(); ++i) {
      CHECK(got.assessments[i].t == orig.assessments[i].t);
      CHECK(got.assessments[i].label == orig.assessments[i].label);
      CHECK(got.assessments[i].score == orig.assessments[i].score);
    }
    CHECK(got.survival.at("pfs").duration == orig.survival.at("pfs").duration);
    CHECK(got.survival.at("pfs").event == orig.survival.at("pfs").event);
  }
  std::filesystem::remove(path);
}

TEST_CASE("truncated cohort file raises a parse error with the line") {
  Rng rng(41);
  CohortGenConfig config;
  config.n_subjects = 6;
  Cohort cohort = gen_mia_cohort(rng, config);
  auto path = temp_path("simta_cohort_truncated.jsonl");
  save_cohort(cohort, path);
  std::string content = read_file(path);
  content.resize(content.size() / 2);  // cut mid-line
  {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << content;
  }
  CHECK_THROWS_WITH_AS(load_cohort(path), doctest::Contains("parse error"), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("a subject without one modality loads as absent") {
  auto path = temp_path("simta_cohort_missing_modality.jsonl");
  {
    std::ofstream out(path, std::ios::trunc);
    out << R"({"id":"a","fold":0,"static":[0.1,0.2],"modalities":{"lab":{"t":[1,2],"x":[[0.5],[0.7]]}},"interventions":{"t":[1.0]},"assessments":[{"t":120,"label":1}]})"
        << "\n";
    out << R"({"id":"b","fold":1,"static":[0.3,0.4],"modalities":{"lab":{"t":[2,5],"x":[[0.1],[0.2]]},"imaging":{"t":[3],"x":[[1,2,3]]}},"interventions":{"t":[]},"assessments":[{"t":150,"label":0}]})"
        << "\n";
  }
  Cohort cohort = load_cohort(path);
  REQUIRE(cohort.subjects.size() == 2);
  CHECK(cohort.subjects[0].modalities.count("imaging") == 0);
  CHECK(cohort.subjects[1].modalities.count("imaging") == 1);
  CHECK_FALSE(cohort.subjects[0].assessments[0].has_score);
  std::filesystem::remove(path);
}

TEST_CASE("schema violations are rejected") {
  auto path = temp_path("simta_cohort_bad_schema.jsonl");
  {
    std::ofstream out(path, std::ios::trunc);
    out << R"({"id":"a","fold":0,"static":[0.1],"modalities":{},"assessments":[{"t":1,"label":3}]})"
        << "\n";
  }
  CHECK_THROWS_AS(load_cohort(path), DataError);
  {
    std::ofstream out(path, std::ios::trunc);
    // second subject's static dim disagrees
    out << R"({"id":"a","fold":0,"static":[0.1,0.2],"modalities":{},"assessments":[]})" << "\n";
    out << R"({"id":"b","fold":1,"static":[0.1],"modalities":{},"assessments":[]})" << "\n";
  }
  CHECK_THROWS_WITH_AS(load_cohort(path), doctest::Contains("schema error"), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("generator config validation") {
  Rng rng(43);
  CohortGenConfig config;
  config.n_subjects = 4;
  CHECK_THROWS_AS(gen_mia_cohort(rng, config), DataError);
}
