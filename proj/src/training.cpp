#include "simta/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "simta/adam.hpp"
#include "simta/error.hpp"
#include "simta/losses.hpp"

namespace simta {

namespace {

constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamVal = 2;
constexpr std::uint64_t kStreamCalibrate = 3;
constexpr std::uint64_t kStreamEpoch = 1000;

Matrix targets_matrix(const SampledInstance& inst) {
  Matrix t(1, inst.target_values.size());
  for (std::size_t i = 0; i < inst.target_values.size(); ++i)
    t(0, i) = inst.target_values[i];
  return t;
}

AsyncSeries standardized(const AsyncSeries& inputs, double mean, double stdev) {
  AsyncSeries out = inputs;
  for (double& v : out.values) v = (v - mean) / stdev;
  return out;
}

// Train-set value statistics from a fixed calibration sample.
std::pair<double, double> calibrate_inputs(const std::vector<BenchmarkSeries>& series,
                                           const std::vector<std::size_t>& train_idx,
                                           Rng calibration_rng, double max_interval) {
  double sum = 0.0, sumsq = 0.0, n = 0.0;
  const std::size_t take = std::min<std::size_t>(train_idx.size(), 512);
  for (std::size_t k = 0; k < take; ++k) {
    Rng item = calibration_rng.derive(k);
    SampledInstance inst =
        sample_instance(series[train_idx[k]].spec, item, max_interval);
    for (double v : inst.inputs.values) {
      sum += v;
      sumsq += v * v;
      n += 1.0;
    }
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  return {mean, var > 0.0 ? std::sqrt(var) : 1.0};
}

}  // namespace

namespace {

constexpr std::size_t kHeadHidden = 32;

MlpHead make_head(std::size_t input_dim, Rng& rng) {
  MlpHead head;
  auto init = [&](std::size_t r, std::size_t c) {
    Matrix m(r, c);
    const double limit = std::sqrt(6.0 / static_cast<double>(r + c));
    for (double& v : m) v = rng.uniform(-limit, limit);
    return m;
  };
  head.w1 = init(input_dim, kHeadHidden);
  head.b1 = Matrix(1, kHeadHidden);
  head.w2 = init(kHeadHidden, 3);
  head.b2 = Matrix(1, 3);
  return head;
}

Matrix head_forward(const MlpHead& head, const Matrix& input, Matrix* z1_out) {
  Matrix z1 = add_row_broadcast(matmul(input, head.w1), head.b1);
  Matrix out = add_row_broadcast(matmul(tanh_act(z1), head.w2), head.b2);
  if (z1_out) *z1_out = std::move(z1);
  return out;
}

struct MlpHeadGrads {
  Matrix w1, b1, w2, b2;
  Matrix input;
};

MlpHeadGrads head_backward(const MlpHead& head, const Matrix& input, const Matrix& z1,
                           const Matrix& d_out) {
  MlpHeadGrads g;
  Matrix a1 = tanh_act(z1);
  g.w2 = matmul(transpose(a1), d_out);
  g.b2 = d_out;
  Matrix d_a1 = matmul(d_out, transpose(head.w2));
  Matrix d_z1 = hadamard(d_a1, tanh_deriv(z1));
  g.w1 = matmul(transpose(input), d_z1);
  g.b1 = d_z1;
  g.input = matmul(d_z1, transpose(head.w1));
  return g;
}

std::size_t head_param_count(std::size_t input_dim) {
  return input_dim * kHeadHidden + kHeadHidden + kHeadHidden * 3 + 3;
}

}  // namespace

SyntheticModel make_synthetic_model(const TrainConfig& config, Rng& rng) {
  const std::size_t h = config.hidden;
  if (config.model == "simta") {
    SimTARegressor m;
    m.stack = make_simta_stack({1, h, h}, Activation::Tanh, rng);
    // Spread the initial decay scales so the stacked modules start at
    // different smoothing horizons instead of identical ones.
    for (std::size_t k = 0; k < m.stack.modules.size(); ++k)
      m.stack.modules[k].lambda_raw = -1.5 + 1.5 * static_cast<double>(k);
    m.head = make_head(h, rng);
    return m;
  }
  // Recurrent baselines sized for parameter parity with the attention model.
  const LstmVariant variant = lstm_variant_from_name(config.model);
  const std::size_t simta_total =
      (1 * h + h + 2) + (h * h + h + 2) + head_param_count(h);
  const std::size_t aug_in = lstm_input_dim(1, variant);
  const std::size_t hidden = lstm_hidden_for_parity(
      aug_in, simta_total, kHeadHidden, kHeadHidden + kHeadHidden * 3 + 3);
  LstmRegressor m;
  m.variant = variant;
  m.lstm = make_lstm(aug_in, hidden, rng);
  m.head = make_head(hidden, rng);
  return m;
}

Matrix synthetic_predict(const SyntheticModel& model, const AsyncSeries& inputs) {
  if (const auto* s = std::get_if<SimTARegressor>(&model)) {
    Matrix summary =
        stack_forward(standardized(inputs, s->input_mean, s->input_std), s->stack, nullptr);
    return head_forward(s->head, summary, nullptr);
  }
  const auto& l = std::get<LstmRegressor>(model);
  Matrix h = lstm_forward(standardized(inputs, l.input_mean, l.input_std), l.lstm,
                          l.variant, nullptr);
  return head_forward(l.head, h, nullptr);
}

std::size_t synthetic_param_count(const SyntheticModel& model) {
  if (const auto* s = std::get_if<SimTARegressor>(&model))
    return s->stack.param_count() + s->head.param_count();
  const auto& l = std::get<LstmRegressor>(model);
  return l.lstm.param_count() + l.head.param_count();
}

namespace {

std::vector<ParamRef> head_refs(MlpHead& head) {
  return {param_ref("head.w1", head.w1), param_ref("head.b1", head.b1),
          param_ref("head.w2", head.w2), param_ref("head.b2", head.b2)};
}

std::vector<ParamRef> head_grad_refs(MlpHeadGrads& g) {
  return {param_ref("head.w1", g.w1), param_ref("head.b1", g.b1),
          param_ref("head.w2", g.w2), param_ref("head.b2", g.b2)};
}

}  // namespace

std::vector<ParamRef> param_refs(SyntheticModel& model) {
  if (auto* s = std::get_if<SimTARegressor>(&model)) {
    auto refs = param_refs(s->stack, "stack");
    auto h = head_refs(s->head);
    refs.insert(refs.end(), h.begin(), h.end());
    return refs;
  }
  auto& l = std::get<LstmRegressor>(model);
  auto refs = param_refs(l.lstm, "lstm");
  auto h = head_refs(l.head);
  refs.insert(refs.end(), h.begin(), h.end());
  return refs;
}

namespace {

// Forward + backward on one instance. Returns the loss and fills grads in
// param_refs order.
double synthetic_step(SyntheticModel& model, const SampledInstance& inst,
                      std::vector<double>& grad_out) {
  const Matrix target = targets_matrix(inst);
  if (auto* s = std::get_if<SimTARegressor>(&model)) {
    SimTAStackCache cache;
    Matrix summary = stack_forward(standardized(inst.inputs, s->input_mean, s->input_std),
                                   s->stack, &cache);
    Matrix z1;
    Matrix pred = head_forward(s->head, summary, &z1);
    LossResult loss = mse_loss(pred, target);
    MlpHeadGrads hg = head_backward(s->head, summary, z1, loss.grad);
    SimTAStackGrads sg = stack_backward(s->stack, cache, hg.input);
    auto refs = grad_refs(sg, "stack");
    auto h = head_grad_refs(hg);
    refs.insert(refs.end(), h.begin(), h.end());
    grad_out = flatten(refs);
    return loss.value;
  }
  auto& l = std::get<LstmRegressor>(model);
  LstmCache cache;
  Matrix inputs =
      lstm_input_matrix(standardized(inst.inputs, l.input_mean, l.input_std), l.variant);
  Matrix h = lstm_forward(inputs, l.lstm, &cache);
  Matrix z1;
  Matrix pred = head_forward(l.head, h, &z1);
  LossResult loss = mse_loss(pred, target);
  MlpHeadGrads hg = head_backward(l.head, h, z1, loss.grad);
  LstmGrads lg = lstm_backward(l.lstm, cache, hg.input);
  auto refs = grad_refs(lg, "lstm");
  auto hr = head_grad_refs(hg);
  refs.insert(refs.end(), hr.begin(), hr.end());
  grad_out = flatten(refs);
  return loss.value;
}

void adam_step_refs(const std::vector<ParamRef>& params, std::span<const double> grads,
                    AdamState& state) {
  // Chunk-wise update without copying parameters out and back.
  std::size_t off = 0;
  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (const ParamRef& r : params) {
    for (std::size_t i = 0; i < r.size; ++i) {
      const double g = grads[off + i];
      if (!std::isfinite(g))
        throw NumericError("adam: non-finite gradient in '" + r.name + "' at offset " +
                           std::to_string(i));
      double& m = state.m[off + i];
      double& v = state.v[off + i];
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g * g;
      r.values[i] -= state.lr * (m / corr1) / (std::sqrt(v / corr2) + state.epsilon);
    }
    off += r.size;
  }
}

}  // namespace

SyntheticResult train_synthetic(const std::vector<BenchmarkSeries>& series,
                                const TrainConfig& config) {
  if (config.epochs < 1) throw DataError("train_synthetic: epochs must be >= 1");
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < series.size(); ++i)
    (series[i].train ? train_idx : val_idx).push_back(i);
  if (train_idx.empty() || val_idx.empty())
    throw DataError("train_synthetic: need both train and validation series");

  Rng master(config.seed);
  Rng init = master.derive(kStreamInit);
  SyntheticResult result{MetricLog{}, make_synthetic_model(config, init)};
  SyntheticModel& model = result.model;

  const auto [input_mean, input_std] = calibrate_inputs(
      series, train_idx, master.derive(kStreamCalibrate), config.max_interval);
  std::visit(
      [&, m = input_mean, s = input_std](auto& reg) {
        reg.input_mean = m;
        reg.input_std = s;
      },
      model);

  // Validation instances are sampled once and fixed for the whole run.
  Rng val_rng = master.derive(kStreamVal);
  std::vector<SampledInstance> val_instances;
  val_instances.reserve(val_idx.size());
  for (std::size_t i : val_idx) {
    Rng item = val_rng.derive(i);
    val_instances.push_back(sample_instance(series[i].spec, item, config.max_interval));
  }

  auto refs = param_refs(model);
  AdamState state(total_size(refs), config.lr);
  std::vector<double> grads, batch;
  std::size_t in_batch = 0;

  // Training instances are sampled once up front and fixed across epochs,
  // like the validation set; resampling per epoch is available as an option.
  const bool fixed_train = !config.resample_train;
  std::vector<SampledInstance> fixed_instances;
  if (fixed_train) {
    Rng fixed_rng = master.derive(kStreamEpoch);
    for (std::size_t i : train_idx) {
      Rng item = fixed_rng.derive(i);
      fixed_instances.push_back(
          sample_instance(series[i].spec, item, config.max_interval));
    }
  }

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng = master.derive(kStreamEpoch + epoch);
    std::vector<std::size_t> order(train_idx.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    epoch_rng.shuffle(order);
    double running = 0.0;
    for (std::size_t k : order) {
      const std::size_t i = train_idx[k];
      Rng item = epoch_rng.derive(i);
      SampledInstance inst =
          fixed_train ? fixed_instances[k]
                      : sample_instance(series[i].spec, item, config.max_interval);
      running += synthetic_step(model, inst, grads);
      if (config.batch_size <= 1) {
        adam_step_refs(refs, grads, state);
      } else {
        if (batch.empty()) batch.assign(grads.size(), 0.0);
        for (std::size_t k = 0; k < grads.size(); ++k) batch[k] += grads[k];
        if (++in_batch == config.batch_size) {
          for (double& g : batch) g /= static_cast<double>(config.batch_size);
          adam_step_refs(refs, batch, state);
          batch.assign(batch.size(), 0.0);
          in_batch = 0;
        }
      }
    }
    result.log.train_loss.push_back(running / static_cast<double>(order.size()));

    double val_running = 0.0;
    for (const SampledInstance& inst : val_instances) {
      Matrix pred = synthetic_predict(model, inst.inputs);
      val_running += mse_loss(pred, targets_matrix(inst)).value;
    }
    result.log.val_loss.push_back(val_running / static_cast<double>(val_instances.size()));
  }
  return result;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw DimensionError("auc: scores and labels length mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("auc: labels must be binary");
    n_pos += static_cast<std::size_t>(y);
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("auc: undefined, both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

struct CohortTask {
  std::size_t subject = 0;
  std::size_t assessment = 0;
};

FusionConfig fusion_config_for(const Cohort& cohort, const TrainConfig& config) {
  std::size_t lab_dim = 0, imaging_dim = 0;
  for (const auto& rec : cohort.subjects) {
    auto lit = rec.modalities.find("lab");
    if (lit != rec.modalities.end()) lab_dim = lit->second.channels();
    auto iit = rec.modalities.find("imaging");
    if (iit != rec.modalities.end()) imaging_dim = iit->second.channels();
    if (lab_dim && imaging_dim) break;
  }
  if (lab_dim == 0 || imaging_dim == 0)
    throw DataError("cohort has no lab or imaging observations to size the model");
  FusionConfig cfg = default_fusion_config(lab_dim, imaging_dim);
  cfg.encoder = config.model == "fusion" ? SerialEncoderKind::SimTA
                                         : encoder_kind_from_name(config.model);
  cfg.static_dim = cohort.subjects.front().statics.size();
  cfg.horizon_days = config.horizon_days;
  if (!config.ablate.empty()) cfg.ablate(config.ablate);
  return cfg;
}

}  // namespace

FoldResult train_fold(const Cohort& cohort, int fold, const TrainConfig& config) {
  const int n_folds = cohort.n_folds();
  if (fold < 0 || fold >= n_folds)
    throw DataError("train_fold: fold " + std::to_string(fold) + " out of range");

  std::vector<std::size_t> train_subjects, eval_subjects;
  for (std::size_t s = 0; s < cohort.subjects.size(); ++s)
    (cohort.fold[s] == fold ? eval_subjects : train_subjects).push_back(s);
  if (train_subjects.empty() || eval_subjects.empty())
    throw DataError("train_fold: empty train or eval fold");

  Rng master(config.seed);
  Rng init = master.derive(kStreamInit + 100 + static_cast<std::uint64_t>(fold));
  FusionConfig cfg = fusion_config_for(cohort, config);
  FoldResult result{make_fusion_model(cfg, init), MetricLog{}, 0.0, {}, 0};
  FusionModel& model = result.model;
  fit_normalization(model, cohort, train_subjects);

  auto collect_tasks = [&](const std::vector<std::size_t>& subjects) {
    std::vector<CohortTask> tasks;
    for (std::size_t s : subjects)
      for (std::size_t a = 0; a < cohort.subjects[s].assessments.size(); ++a) {
        const PredictionTask task =
            make_task(cohort.subjects[s].assessments[a], config.horizon_days);
        try {
          fusion_forward(model, cohort.subjects[s], task, nullptr);
          tasks.push_back({s, a});
        } catch (const InsufficientDataError&) {
          ++result.skipped_tasks;  // abstain: nothing visible at the cutoff
        }
      }
    return tasks;
  };
  std::vector<CohortTask> train_tasks = collect_tasks(train_subjects);
  std::vector<CohortTask> eval_tasks = collect_tasks(eval_subjects);
  if (train_tasks.empty()) throw DataError("train_fold: no trainable assessments");

  auto refs = param_refs(model);
  AdamState state(total_size(refs), config.lr);
  std::vector<double> batch;
  std::size_t in_batch = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng = master.derive(kStreamEpoch + epoch);
    std::vector<CohortTask> order = train_tasks;
    epoch_rng.shuffle(order);
    double running = 0.0;
    for (const CohortTask& t : order) {
      const SubjectRecord& rec = cohort.subjects[t.subject];
      const Assessment& a = rec.assessments[t.assessment];
      FusionCache cache;
      Matrix scores = fusion_forward(model, rec, make_task(a, config.horizon_days), &cache);
      LossResult loss = cross_entropy_loss(scores, {a.label});
      running += loss.value;
      FusionGrads grads = fusion_backward(model, cache, loss.grad);
      auto grefs = grad_refs(grads, model);
      if (config.batch_size <= 1) {
        adam_step_refs(refs, flatten(grefs), state);
      } else {
        std::vector<double> flat = flatten(grefs);
        if (batch.empty()) batch.assign(flat.size(), 0.0);
        for (std::size_t k = 0; k < flat.size(); ++k) batch[k] += flat[k];
        if (++in_batch == config.batch_size) {
          for (double& g : batch) g /= static_cast<double>(config.batch_size);
          adam_step_refs(refs, batch, state);
          batch.assign(batch.size(), 0.0);
          in_batch = 0;
        }
      }
    }
    result.log.train_loss.push_back(running / static_cast<double>(order.size()));

    double val_running = 0.0;
    for (const CohortTask& t : eval_tasks) {
      const SubjectRecord& rec = cohort.subjects[t.subject];
      const Assessment& a = rec.assessments[t.assessment];
      Matrix scores = fusion_forward(model, rec, make_task(a, config.horizon_days), nullptr);
      val_running += cross_entropy_loss(scores, {a.label}).value;
    }
    result.log.val_loss.push_back(
        eval_tasks.empty() ? 0.0 : val_running / static_cast<double>(eval_tasks.size()));
  }

  std::vector<double> probs;
  std::vector<int> labels;
  for (const CohortTask& t : eval_tasks) {
    const SubjectRecord& rec = cohort.subjects[t.subject];
    const Assessment& a = rec.assessments[t.assessment];
    const double p = predict_proba(model, rec, make_task(a, config.horizon_days));
    result.preds.push_back({rec.id, a.t, p, a.label});
    probs.push_back(p);
    labels.push_back(a.label);
  }
  try {
    result.auc_value = auc(probs, labels);
  } catch (const DataError&) {
    result.auc_value = std::numeric_limits<double>::quiet_NaN();
  }
  result.log.final_auc = result.auc_value;
  return result;
}

namespace {

void run_jobs(std::vector<std::function<void()>>& jobs, unsigned max_threads) {
  if (max_threads <= 1 || jobs.size() <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  const unsigned workers =
      std::min<unsigned>(max_threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        jobs[i]();
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Comparison run_synthetic_comparison(const std::vector<BenchmarkSeries>& series,
                                    const TrainConfig& base, unsigned max_threads) {
  const std::vector<std::string> variants{"simta", "lstm", "lstm_i", "lstm_s"};
  Comparison cmp;
  cmp.metric_name = "val_mse";
  cmp.entries.resize(variants.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    jobs.push_back([&, i] {
      TrainConfig config = base;
      config.model = variants[i];
      SyntheticResult res = train_synthetic(series, config);
      ComparisonEntry entry;
      entry.name = variants[i];
      entry.log = std::move(res.log);
      entry.final_metric = entry.log.val_loss.back();
      cmp.entries[i] = std::move(entry);
    });
  }
  run_jobs(jobs, max_threads);
  return cmp;
}

Comparison run_cohort_comparison(const Cohort& cohort, const TrainConfig& base,
                                 unsigned max_threads) {
  struct VariantSpec {
    std::string name;
    std::string model;
    std::string ablate;
  };
  const std::vector<VariantSpec> variants{
      {"lstm", "lstm", ""},
      {"lstm_i", "lstm_i", ""},
      {"lstm_s", "lstm_s", ""},
      {"fusion", "fusion", ""},
      {"fusion_wo_radiomics", "fusion", "radiomics"},
      {"fusion_wo_lab", "fusion", "lab"},
  };
  const int n_folds = cohort.n_folds();
  if (n_folds < 2) throw DataError("run_cohort_comparison: cohort needs >= 2 folds");

  Comparison cmp;
  cmp.metric_name = "auc";
  cmp.entries.resize(variants.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    jobs.push_back([&, i] {
      TrainConfig config = base;
      config.model = variants[i].model;
      config.ablate = variants[i].ablate;
      std::vector<PredRecord> pooled;
      std::vector<double> fold_aucs;
      MetricLog mean_log;
      for (int f = 0; f < n_folds; ++f) {
        FoldResult fr = train_fold(cohort, f, config);
        pooled.insert(pooled.end(), fr.preds.begin(), fr.preds.end());
        if (std::isfinite(fr.auc_value)) fold_aucs.push_back(fr.auc_value);
        if (mean_log.train_loss.empty()) {
          mean_log = fr.log;
        } else {
          for (std::size_t e = 0; e < mean_log.train_loss.size(); ++e) {
            mean_log.train_loss[e] += fr.log.train_loss[e];
            mean_log.val_loss[e] += fr.log.val_loss[e];
          }
        }
      }
      for (double& v : mean_log.train_loss) v /= static_cast<double>(n_folds);
      for (double& v : mean_log.val_loss) v /= static_cast<double>(n_folds);

      std::vector<double> probs;
      std::vector<int> labels;
      for (const PredRecord& p : pooled) {
        probs.push_back(p.probability);
        labels.push_back(p.label);
      }
      ComparisonEntry entry;
      entry.name = variants[i].name;
      entry.log = std::move(mean_log);
      entry.final_metric = auc(probs, labels);
      if (!fold_aucs.empty())
        entry.fold_mean = std::accumulate(fold_aucs.begin(), fold_aucs.end(), 0.0) /
                          static_cast<double>(fold_aucs.size());
      entry.log.final_auc = entry.final_metric;
      if (variants[i].name == "fusion") cmp.pooled_preds = pooled;
      cmp.entries[i] = std::move(entry);
    });
  }
  run_jobs(jobs, max_threads);
  return cmp;
}

std::size_t epochs_to_reach(const std::vector<double>& losses, double threshold) {
  for (std::size_t e = 0; e < losses.size(); ++e)
    if (losses[e] <= threshold) return e + 1;
  return 0;
}

Cohort shuffle_labels(const Cohort& cohort, Rng& rng) {
  Cohort out = cohort;
  std::vector<int> labels;
  for (const auto& rec : out.subjects)
    for (const auto& a : rec.assessments) labels.push_back(a.label);
  rng.shuffle(labels);
  std::size_t k = 0;
  for (auto& rec : out.subjects)
    for (auto& a : rec.assessments) a.label = labels[k++];
  return out;
}

}  // namespace simta
