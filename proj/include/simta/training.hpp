#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "simta/cohort.hpp"
#include "simta/datagen.hpp"
#include "simta/fusion.hpp"
#include "simta/lstm.hpp"
#include "simta/simta_layer.hpp"

namespace simta {

struct TrainConfig {
  std::string model = "simta";  // simta | lstm | lstm_i | lstm_s | fusion
  std::size_t epochs = 100;
  std::size_t batch_size = 1;  // gradient-accumulation count
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double max_interval = 2.0;  // I: upper bound of the sampled input intervals
  std::size_t hidden = 32;    // attention width on the regression task
  std::string ablate;         // "", "radiomics" or "lab" (fusion only)
  double horizon_days = 90.0;
  bool resample_train = false;  // regression task: fresh instances every epoch
};

struct MetricLog {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  double final_auc = std::numeric_limits<double>::quiet_NaN();
};

/// Two-layer readout shared by the regression models.
struct MlpHead {
  Matrix w1, b1;  // input -> hidden, tanh
  Matrix w2, b2;  // hidden -> 3
  std::size_t param_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }
};

/// Attention model for the next-3-points regression task: a SimTA block
/// whose summary vector feeds an MLP head. Input values are standardized
/// with train-set statistics (frozen at training start) so the activations
/// start in their linear range; targets stay in raw units.
struct SimTARegressor {
  SimTAStack stack;
  MlpHead head;
  double input_mean = 0.0;
  double input_std = 1.0;
};

struct LstmRegressor {
  LstmVariant variant = LstmVariant::Plain;
  LstmParams lstm;
  MlpHead head;
  double input_mean = 0.0;
  double input_std = 1.0;
};

using SyntheticModel = std::variant<SimTARegressor, LstmRegressor>;

SyntheticModel make_synthetic_model(const TrainConfig& config, Rng& rng);
Matrix synthetic_predict(const SyntheticModel& model, const AsyncSeries& inputs);
std::size_t synthetic_param_count(const SyntheticModel& model);
std::vector<ParamRef> param_refs(SyntheticModel& model);

struct SyntheticResult {
  MetricLog log;
  SyntheticModel model;
};

/// MSE training on the trigonometric benchmark. Training instances are
/// re-sampled each epoch from per-(epoch, series) derived streams; the
/// validation instances are sampled once up front and stay fixed. Fully
/// deterministic under (seed, config, data).
SyntheticResult train_synthetic(const std::vector<BenchmarkSeries>& series,
                                const TrainConfig& config);

/// Mann-Whitney AUC with midranks for ties. Both classes must be present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct PredRecord {
  std::string subject_id;
  double assessment_t = 0.0;
  double probability = 0.0;
  int label = 0;
};

struct FoldResult {
  FusionModel model;
  MetricLog log;
  double auc_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<PredRecord> preds;  // held-out fold
  std::size_t skipped_tasks = 0;  // no serial data visible at the cutoff
};

/// BCE training on two folds, AUC on the held-out fold. Normalization
/// statistics come from the training folds only.
FoldResult train_fold(const Cohort& cohort, int fold, const TrainConfig& config);

struct ComparisonEntry {
  std::string name;
  MetricLog log;  // cohort task: losses averaged over folds
  double final_metric = std::numeric_limits<double>::quiet_NaN();
  double fold_mean = std::numeric_limits<double>::quiet_NaN();
};

struct Comparison {
  std::string metric_name;  // "val_mse" or "auc"
  std::vector<ComparisonEntry> entries;
  std::vector<PredRecord> pooled_preds;  // cohort task, "fusion" variant
};

/// Trains the four regression variants under identical seeds and reports
/// their final validation MSE. max_threads > 1 trains variants concurrently;
/// results are identical either way.
Comparison run_synthetic_comparison(const std::vector<BenchmarkSeries>& series,
                                    const TrainConfig& base, unsigned max_threads = 1);

/// Trains the six cohort variants (three recurrent encoders, the attention
/// model, and its two single-modality ablations) with 3-fold cross
/// validation; reports pooled-AUC per variant.
Comparison run_cohort_comparison(const Cohort& cohort, const TrainConfig& base,
                                 unsigned max_threads = 1);

/// First epoch (1-based) whose training loss is <= threshold; 0 if never.
std::size_t epochs_to_reach(const std::vector<double>& losses, double threshold);

/// Copy of the cohort with assessment labels shuffled across the entire
/// cohort (permutation baseline).
Cohort shuffle_labels(const Cohort& cohort, Rng& rng);

}  // namespace simta
