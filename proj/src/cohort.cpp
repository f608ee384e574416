#include "simta/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "simta/activations.hpp"
#include "simta/error.hpp"
#include "simta/io_util.hpp"

namespace simta {

using nlohmann::json;

int Cohort::n_folds() const {
  int top = -1;
  for (int f : fold) top = std::max(top, f);
  return top + 1;
}

namespace {

constexpr std::uint64_t kStreamWeights = 1;
constexpr std::uint64_t kStreamFolds = 2;
constexpr std::uint64_t kStreamSubjects = 1000;

// Sparse channel loadings: n_signal distinct channels get weights of
// magnitude U(0.6, 1.0) with random sign, the rest stay zero.
std::vector<double> draw_loadings(std::size_t dim, std::size_t n_signal, Rng& rng) {
  std::vector<double> loading(dim, 0.0);
  std::vector<std::size_t> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  n_signal = std::min(n_signal, dim);
  for (std::size_t k = 0; k < n_signal; ++k) {
    double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    loading[idx[k]] = sign * rng.uniform(0.6, 1.0);
  }
  return loading;
}

struct LatentTrajectory {
  double level = 0.0;
  double drift = 0.0;  // per year
  double at(double t_days) const { return level + drift * t_days / 365.0; }
};

// Recency-weighted mean of latent values over observations visible at the
// cutoff; 0 when nothing is visible yet.
double recency_functional(const std::vector<double>& times,
                          const std::vector<double>& latents, double cutoff,
                          double recency_days) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > cutoff) break;
    double w = std::exp(-(cutoff - times[i]) / recency_days);
    num += w * latents[i];
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

struct SerialDraw {
  AsyncSeries series;
  std::vector<double> latent_obs;  // per-observation latent value (signal content)
};

SerialDraw draw_serial(double first_lo, double first_hi, double gap_lo, double gap_hi,
                       double window, std::size_t dim,
                       const std::vector<double>& loading, double noise,
                       const LatentTrajectory& latent, Rng& rng, bool single) {
  std::vector<double> times;
  double t = rng.uniform(first_lo, first_hi);
  if (single) {
    times.push_back(t);
  } else {
    while (t < window) {
      times.push_back(t);
      t += rng.uniform(gap_lo, gap_hi);
    }
  }
  SerialDraw out;
  out.series.values = Matrix(times.size(), dim);
  out.series.timestamps = times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double z = latent.at(times[i]) + 0.3 * rng.normal();
    out.latent_obs.push_back(z);
    for (std::size_t c = 0; c < dim; ++c)
      out.series.values(i, c) = loading[c] * z + noise * rng.normal();
  }
  return out;
}

SurvivalEndpoint draw_survival(double base_median, double gamma, double score_mean,
                               double censor_lo, double censor_hi, Rng& rng) {
  const double median = base_median * std::exp(gamma * score_mean);
  const double rate = std::log(2.0) / median;
  const double event_time = -std::log(1.0 - rng.uniform()) / rate;
  const double censor_time = rng.uniform(censor_lo, censor_hi);
  SurvivalEndpoint ep;
  ep.event = event_time <= censor_time;
  ep.duration = std::min(event_time, censor_time);
  return ep;
}

}  // namespace

Cohort gen_mia_cohort(Rng& rng, const CohortGenConfig& config) {
  if (config.n_subjects < 6)
    throw DataError("gen_mia_cohort: need at least 6 subjects for 3 folds");
  if (config.n_folds < 2) throw DataError("gen_mia_cohort: need at least 2 folds");
  if (config.n_subjects < static_cast<std::size_t>(2 * config.n_folds))
    throw DataError("gen_mia_cohort: need at least 2 subjects per fold");
  if (config.horizon_days < 0.0) throw DataError("gen_mia_cohort: negative horizon");

  Rng weights_rng = rng.derive(kStreamWeights);
  const std::vector<double> lab_loading =
      draw_loadings(config.lab_dim, config.signal_channels_lab, weights_rng);
  const std::vector<double> imaging_loading =
      draw_loadings(config.imaging_dim, config.signal_channels_imaging, weights_rng);
  std::vector<double> static_dir =
      draw_loadings(config.static_dim, config.signal_channels_static, weights_rng);
  double norm = 0.0;
  for (double w : static_dir) norm += w * w;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& w : static_dir) w /= norm;

  Cohort cohort;
  for (std::size_t s = 0; s < config.n_subjects; ++s) {
    Rng sub = rng.derive(kStreamSubjects + s);
    SubjectRecord rec;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "s%03zu", s);
    rec.id = idbuf;

    const double window = sub.uniform(config.window_lo, config.window_hi);

    rec.statics.resize(config.static_dim);
    for (double& v : rec.statics) v = sub.normal();
    double static_score = 0.0;
    for (std::size_t c = 0; c < config.static_dim; ++c)
      static_score += rec.statics[c] * static_dir[c];

    LatentTrajectory lab_latent{sub.normal(), 0.5 * sub.normal()};
    LatentTrajectory imaging_latent{sub.normal(), 0.5 * sub.normal()};

    SerialDraw lab = draw_serial(2.0, config.lab_gap_hi, config.lab_gap_lo,
                                 config.lab_gap_hi, window, config.lab_dim,
                                 lab_loading, config.observation_noise, lab_latent,
                                 sub, false);
    const bool single_scan = sub.uniform() < config.single_imaging_prob;
    SerialDraw imaging = draw_serial(5.0, 30.0, config.imaging_gap_lo,
                                     config.imaging_gap_hi, window, config.imaging_dim,
                                     imaging_loading, config.observation_noise,
                                     imaging_latent, sub, single_scan);
    rec.modalities["lab"] = lab.series;
    rec.modalities["imaging"] = imaging.series;

    std::vector<double> iv_times;
    double iv = sub.uniform(0.0, 14.0);
    while (iv < window) {
      iv_times.push_back(iv);
      iv += sub.uniform(config.intervention_gap_lo, config.intervention_gap_hi);
    }
    rec.interventions.values = Matrix(iv_times.size(), 1, 1.0);
    rec.interventions.timestamps = iv_times;

    const PlantedEffect& eff = config.effect;
    double score_sum = 0.0;
    double assess_t = sub.uniform(config.first_assessment_lo, config.first_assessment_hi);
    while (assess_t <= window) {
      const double cutoff = assess_t - config.horizon_days;
      const double g_lab = recency_functional(lab.series.timestamps, lab.latent_obs,
                                              cutoff, eff.recency_days);
      const double g_imaging = recency_functional(
          imaging.series.timestamps, imaging.latent_obs, cutoff, eff.recency_days);
      const double score =
          eff.w_lab * g_lab + eff.w_imaging * g_imaging + eff.w_static * static_score;
      Assessment a;
      a.t = assess_t;
      a.score = score;
      a.has_score = true;
      a.label = sub.uniform() < sigmoid_scalar(eff.scale * score) ? 1 : 0;
      rec.assessments.push_back(a);
      score_sum += score;
      assess_t += sub.uniform(config.assessment_gap_lo, config.assessment_gap_hi);
    }
    const double score_mean =
        rec.assessments.empty() ? 0.0
                                : score_sum / static_cast<double>(rec.assessments.size());

    // Longer survival for high planted score, so stratification by a good
    // model separates the curves.
    rec.survival["os"] = draw_survival(300.0, 0.8, score_mean, 400.0, 1200.0, sub);
    rec.survival["pfs"] = draw_survival(150.0, 0.8, score_mean, 250.0, 900.0, sub);

    cohort.subjects.push_back(std::move(rec));
  }

  std::vector<std::size_t> order(config.n_subjects);
  std::iota(order.begin(), order.end(), 0);
  Rng fold_rng = rng.derive(kStreamFolds);
  fold_rng.shuffle(order);
  cohort.fold.resize(config.n_subjects);
  for (std::size_t i = 0; i < order.size(); ++i)
    cohort.fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(config.n_folds));
  return cohort;
}

namespace {

json series_to_json(const AsyncSeries& s) {
  json x = json::array();
  for (std::size_t i = 0; i < s.values.rows(); ++i) {
    json rowv = json::array();
    for (std::size_t c = 0; c < s.values.cols(); ++c) rowv.push_back(s.values(i, c));
    x.push_back(std::move(rowv));
  }
  return {{"t", s.timestamps}, {"x", std::move(x)}};
}

AsyncSeries series_from_json(const json& j, std::size_t line_no) {
  AsyncSeries s;
  s.timestamps = j.at("t").get<std::vector<double>>();
  const json& x = j.at("x");
  if (x.size() != s.timestamps.size())
    throw DataError("schema error at line " + std::to_string(line_no) +
                    ": t and x lengths disagree");
  std::size_t cols = s.timestamps.empty() ? 0 : x.at(0).size();
  s.values = Matrix(s.timestamps.size(), cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.at(i).size() != cols)
      throw DataError("schema error at line " + std::to_string(line_no) +
                      ": ragged value rows");
    for (std::size_t c = 0; c < cols; ++c) s.values(i, c) = x.at(i).at(c).get<double>();
  }
  if (!s.timestamps.empty()) s.validate();
  return s;
}

}  // namespace

void save_cohort(const Cohort& cohort, const std::filesystem::path& path) {
  if (cohort.fold.size() != cohort.subjects.size())
    throw DataError("save_cohort: fold assignment does not cover all subjects");
  std::ostringstream out;
  for (std::size_t i = 0; i < cohort.subjects.size(); ++i) {
    const SubjectRecord& rec = cohort.subjects[i];
    json j;
    j["id"] = rec.id;
    j["fold"] = cohort.fold[i];
    j["static"] = rec.statics;
    json mods = json::object();
    for (const auto& [name, series] : rec.modalities) mods[name] = series_to_json(series);
    j["modalities"] = std::move(mods);
    j["interventions"] = {{"t", rec.interventions.timestamps}};
    json assess = json::array();
    for (const Assessment& a : rec.assessments) {
      json aj = {{"t", a.t}, {"label", a.label}};
      if (a.has_score) aj["score"] = a.score;
      assess.push_back(std::move(aj));
    }
    j["assessments"] = std::move(assess);
    if (!rec.survival.empty()) {
      json surv = json::object();
      for (const auto& [name, ep] : rec.survival)
        surv[name] = {{"t", ep.duration}, {"event", ep.event}};
      j["survival"] = std::move(surv);
    }
    out << j.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

Cohort load_cohort(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  Cohort cohort;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> modality_dims;
  std::size_t static_dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("parse error at line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      SubjectRecord rec;
      rec.id = j.at("id").get<std::string>();
      cohort.fold.push_back(j.at("fold").get<int>());
      rec.statics = j.at("static").get<std::vector<double>>();
      if (cohort.subjects.empty()) {
        static_dim = rec.statics.size();
      } else if (rec.statics.size() != static_dim) {
        throw DataError("schema error at line " + std::to_string(line_no) +
                        ": static dim " + std::to_string(rec.statics.size()) +
                        " differs from " + std::to_string(static_dim));
      }
      for (const auto& [name, sj] : j.at("modalities").items()) {
        AsyncSeries s = series_from_json(sj, line_no);
        auto [it, inserted] = modality_dims.emplace(name, s.values.cols());
        if (!inserted && it->second != s.values.cols() && s.steps() > 0)
          throw DataError("schema error at line " + std::to_string(line_no) +
                          ": modality '" + name + "' dim " +
                          std::to_string(s.values.cols()) + " differs from " +
                          std::to_string(it->second));
        rec.modalities[name] = std::move(s);
      }
      if (j.contains("interventions")) {
        rec.interventions.timestamps =
            j.at("interventions").at("t").get<std::vector<double>>();
        rec.interventions.values =
            Matrix(rec.interventions.timestamps.size(), 1, 1.0);
        if (!rec.interventions.timestamps.empty()) rec.interventions.validate();
      }
      for (const json& aj : j.at("assessments")) {
        Assessment a;
        a.t = aj.at("t").get<double>();
        a.label = aj.at("label").get<int>();
        if (a.label != 0 && a.label != 1)
          throw DataError("schema error at line " + std::to_string(line_no) +
                          ": label must be binary");
        if (aj.contains("score")) {
          a.score = aj.at("score").get<double>();
          a.has_score = true;
        }
        rec.assessments.push_back(a);
      }
      if (j.contains("survival")) {
        for (const auto& [name, sj] : j.at("survival").items()) {
          SurvivalEndpoint ep;
          ep.duration = sj.at("t").get<double>();
          ep.event = sj.at("event").get<bool>();
          rec.survival[name] = ep;
        }
      }
      cohort.subjects.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw DataError("schema error at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (cohort.subjects.empty())
    throw DataError("cohort file " + path.string() + " is empty");
  return cohort;
}

}  // namespace simta
