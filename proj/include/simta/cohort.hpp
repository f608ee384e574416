#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "simta/rng.hpp"
#include "simta/series.hpp"

namespace simta {

/// One therapy-response evaluation. label is 1 for response, 0 otherwise.
/// score is generator metadata: the planted log-odds driver behind the label
/// (absent for real-world files), kept so oracle scorers can be tested.
struct Assessment {
  double t = 0.0;
  int label = 0;
  double score = 0.0;
  bool has_score = false;
};

struct SurvivalEndpoint {
  double duration = 0.0;  // days
  bool event = false;     // false = censored
};

struct SubjectRecord {
  std::string id;
  std::vector<double> statics;
  std::map<std::string, AsyncSeries> modalities;  // absent keys are legal
  AsyncSeries interventions;                      // binary flags; may be empty
  std::vector<Assessment> assessments;
  std::map<std::string, SurvivalEndpoint> survival;  // "os", "pfs"
};

struct Cohort {
  std::vector<SubjectRecord> subjects;
  std::vector<int> fold;  // parallel to subjects
  int n_folds() const;
};

/// Strength of the planted signal. Labels are Bernoulli of
/// sigmoid(scale * (w_lab*g_lab + w_imaging*g_imaging + w_static*h)), where
/// g_m is an exponentially recency-weighted mean of modality m's latent
/// trajectory over the observations visible at the assessment cutoff. Both
/// serial modalities carry independent latents, so dropping either one
/// strictly reduces the attainable AUC.
struct PlantedEffect {
  double w_lab = 1.0;
  double w_imaging = 1.0;
  double w_static = 0.7;
  double scale = 2.0;
  double recency_days = 60.0;
};

struct CohortGenConfig {
  std::size_t n_subjects = 99;
  int n_folds = 3;
  std::size_t lab_dim = 22;
  std::size_t imaging_dim = 107;
  std::size_t static_dim = 18;
  double window_lo = 180.0, window_hi = 540.0;        // observation window, days
  double lab_gap_lo = 5.0, lab_gap_hi = 30.0;         // blood-test cadence
  double imaging_gap_lo = 30.0, imaging_gap_hi = 90.0;
  double intervention_gap_lo = 14.0, intervention_gap_hi = 28.0;
  double first_assessment_lo = 120.0, first_assessment_hi = 180.0;
  double assessment_gap_lo = 60.0, assessment_gap_hi = 100.0;
  double horizon_days = 90.0;       // data visible to models: t <= assessment - horizon
  double single_imaging_prob = 0.08;  // subjects with exactly one scan
  std::size_t signal_channels_lab = 6;
  std::size_t signal_channels_imaging = 10;
  std::size_t signal_channels_static = 5;
  double observation_noise = 0.8;
  PlantedEffect effect;
};

/// Deterministic function of (rng seed, config); regeneration is bit-identical.
Cohort gen_mia_cohort(Rng& rng, const CohortGenConfig& config);

/// JSON-lines, one subject per line, raw (unnormalized) values.
void save_cohort(const Cohort& cohort, const std::filesystem::path& path);
Cohort load_cohort(const std::filesystem::path& path);

}  // namespace simta
