#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "simta/activations.hpp"
#include "simta/cohort.hpp"
#include "simta/lstm.hpp"
#include "simta/params.hpp"
#include "simta/simta_layer.hpp"
#include "simta/temporal_encoding.hpp"

namespace simta {

/// Serial-data backbone of the multi-modal model. SimTA is the proposed
/// encoder; the Lstm* kinds swap in a recurrent encoder of comparable
/// parameter count (the ablation baselines).
enum class SerialEncoderKind { SimTA, Lstm, LstmInterval, LstmStamp };

SerialEncoderKind encoder_kind_from_name(const std::string& name);
std::string encoder_kind_name(SerialEncoderKind k);

struct ModalityConfig {
  std::string name;
  std::size_t input_dim = 0;
  std::size_t summary_dim = 32;  // even (temporal encoding is added to it)
  std::size_t stack_depth = 2;
  bool normalize = true;  // one-hot flags (interventions) skip normalization
};

struct FusionConfig {
  std::vector<ModalityConfig> modalities;
  SerialEncoderKind encoder = SerialEncoderKind::SimTA;
  std::size_t static_dim = 18;
  std::size_t static_embed = 16;
  std::size_t head_hidden = 32;
  double horizon_days = 90.0;
  double temporal_base = 10000.0;
  Activation activation = Activation::Tanh;

  /// Removes one serial modality entirely (stack, placeholder and head input
  /// width shrink with it).
  void ablate(const std::string& modality_name);
};

/// lab + imaging + interventions with the default widths.
FusionConfig default_fusion_config(std::size_t lab_dim, std::size_t imaging_dim);

struct NormStats {
  std::map<std::string, std::vector<double>> mean;
  std::map<std::string, std::vector<double>> stdev;
  std::vector<double> static_mean, static_stdev;
  bool fitted = false;
};

/// One serial modality's encoder: a SimTA stack or an LSTM, plus a linear
/// route for subjects with exactly one visible observation (a single scan is
/// static data, not a series) and a learned placeholder for absence.
struct ModalityEncoder {
  ModalityConfig cfg;
  SerialEncoderKind kind = SerialEncoderKind::SimTA;
  SimTAStack stack;
  LstmParams lstm;
  Matrix single_w, single_b;  // input_dim -> slot_dim
  Matrix placeholder;         // 1 x slot_dim

  std::size_t slot_dim() const {
    return kind == SerialEncoderKind::SimTA ? cfg.summary_dim : lstm.hidden();
  }
  std::size_t param_count() const;
};

struct FusionModel {
  FusionConfig cfg;
  std::vector<ModalityEncoder> encoders;
  Matrix static_w1, static_b1, static_w2, static_b2;
  Matrix head_w1, head_b1, head_w2, head_b2;
  NormStats norm;
  std::uint64_t init_seed = 0;

  std::size_t concat_dim() const;
  std::size_t param_count() const;
};

FusionModel make_fusion_model(const FusionConfig& cfg, Rng& rng);

/// One prediction: the label lives at assessment_t, the model sees data up
/// to cutoff = assessment_t - horizon.
struct PredictionTask {
  double assessment_t = 0.0;
  double cutoff = 0.0;
  int label = 0;
};

PredictionTask make_task(const Assessment& a, double horizon_days);

enum class ModalityRoute { Absent, Single, Serial };

struct ModalityCache {
  ModalityRoute route = ModalityRoute::Absent;
  AsyncSeries visible;  // normalized visible observations (Single/Serial)
  SimTAStackCache stack;
  LstmCache lstm;
};

struct FusionCache {
  std::vector<ModalityCache> modalities;
  Matrix statics_norm;
  Matrix static_z1;  // pre-activation of the first static layer
  Matrix concat;
  Matrix head_z1;
};

/// Two-class scores (1x2). Throws InsufficientDataError when no serial
/// modality has any visible observation at the cutoff.
Matrix fusion_forward(const FusionModel& model, const SubjectRecord& subject,
                      const PredictionTask& task, FusionCache* cache);

struct ModalityEncoderGrads {
  SimTAStackGrads stack;
  LstmGrads lstm;
  Matrix single_w, single_b;
  Matrix placeholder;
};

struct FusionGrads {
  std::vector<ModalityEncoderGrads> encoders;
  Matrix static_w1, static_b1, static_w2, static_b2;
  Matrix head_w1, head_b1, head_w2, head_b2;
};

FusionGrads fusion_backward(const FusionModel& model, const FusionCache& cache,
                            const Matrix& d_scores);

/// Probability of response (class 1).
double predict_proba(const FusionModel& model, const SubjectRecord& subject,
                     const PredictionTask& task);

std::vector<ParamRef> param_refs(FusionModel& model);
std::vector<ParamRef> grad_refs(FusionGrads& grads, const FusionModel& model);

/// Per-channel mean/std from the given subjects only (the training folds).
void fit_normalization(FusionModel& model, const Cohort& cohort,
                       const std::vector<std::size_t>& train_subjects);

/// Versioned JSON checkpoint with config, normalization statistics and all
/// weights; load rejects other format versions.
void save_checkpoint(const FusionModel& model, const std::filesystem::path& path);
FusionModel load_checkpoint(const std::filesystem::path& path);

}  // namespace simta
