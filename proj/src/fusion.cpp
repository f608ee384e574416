#include "simta/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "simta/error.hpp"
#include "simta/io_util.hpp"
#include "simta/losses.hpp"

namespace simta {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

LstmVariant variant_of(SerialEncoderKind k) {
  switch (k) {
    case SerialEncoderKind::Lstm: return LstmVariant::Plain;
    case SerialEncoderKind::LstmInterval: return LstmVariant::Interval;
    case SerialEncoderKind::LstmStamp: return LstmVariant::Stamp;
    case SerialEncoderKind::SimTA: break;
  }
  throw NumericError("variant_of: not an lstm encoder");
}

std::size_t simta_stack_param_count(const ModalityConfig& mc) {
  std::size_t total = mc.input_dim * mc.summary_dim + mc.summary_dim + 2;
  for (std::size_t d = 1; d < mc.stack_depth; ++d)
    total += mc.summary_dim * mc.summary_dim + mc.summary_dim + 2;
  return total;
}

Matrix glorot(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  const double limit = std::sqrt(6.0 / static_cast<double>(r + c));
  for (double& v : m) v = rng.uniform(-limit, limit);
  return m;
}

Matrix normalize_values(const Matrix& values, const std::vector<double>& mean,
                        const std::vector<double>& stdev) {
  Matrix out = values;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(i, c) = (out(i, c) - mean[c]) / std::max(stdev[c], 1e-8);
  return out;
}

}  // namespace

SerialEncoderKind encoder_kind_from_name(const std::string& name) {
  if (name == "simta") return SerialEncoderKind::SimTA;
  if (name == "lstm") return SerialEncoderKind::Lstm;
  if (name == "lstm_i") return SerialEncoderKind::LstmInterval;
  if (name == "lstm_s") return SerialEncoderKind::LstmStamp;
  throw DataError("unknown encoder kind: " + name);
}

std::string encoder_kind_name(SerialEncoderKind k) {
  switch (k) {
    case SerialEncoderKind::SimTA: return "simta";
    case SerialEncoderKind::Lstm: return "lstm";
    case SerialEncoderKind::LstmInterval: return "lstm_i";
    case SerialEncoderKind::LstmStamp: return "lstm_s";
  }
  return "?";
}

void FusionConfig::ablate(const std::string& modality_name) {
  const std::string target = modality_name == "radiomics" ? "imaging" : modality_name;
  auto it = std::find_if(modalities.begin(), modalities.end(),
                         [&](const ModalityConfig& m) { return m.name == target; });
  if (it == modalities.end())
    throw DataError("ablate: no modality named '" + modality_name + "'");
  modalities.erase(it);
}

FusionConfig default_fusion_config(std::size_t lab_dim, std::size_t imaging_dim) {
  FusionConfig cfg;
  cfg.modalities = {
      {"lab", lab_dim, 32, 2, true},
      {"imaging", imaging_dim, 32, 2, true},
      {"interventions", 1, 8, 1, false},
  };
  return cfg;
}

std::size_t ModalityEncoder::param_count() const {
  std::size_t n = single_w.size() + single_b.size() + placeholder.size();
  if (kind == SerialEncoderKind::SimTA) return n + stack.param_count();
  return n + lstm.param_count();
}

std::size_t FusionModel::concat_dim() const {
  std::size_t n = cfg.static_embed;
  for (const auto& e : encoders) n += e.slot_dim();
  return n;
}

std::size_t FusionModel::param_count() const {
  std::size_t n = 0;
  for (const auto& e : encoders) n += e.param_count();
  n += static_w1.size() + static_b1.size() + static_w2.size() + static_b2.size();
  n += head_w1.size() + head_b1.size() + head_w2.size() + head_b2.size();
  return n;
}

FusionModel make_fusion_model(const FusionConfig& cfg, Rng& rng) {
  if (cfg.modalities.empty())
    throw DataError("make_fusion_model: no serial modalities configured");
  FusionModel model;
  model.cfg = cfg;
  model.init_seed = rng.seed();
  for (const auto& mc : cfg.modalities) {
    if (mc.summary_dim % 2 != 0)
      throw DataError("make_fusion_model: summary dim of '" + mc.name +
                      "' must be even for the temporal encoding");
    ModalityEncoder enc;
    enc.cfg = mc;
    enc.kind = cfg.encoder;
    if (cfg.encoder == SerialEncoderKind::SimTA) {
      std::vector<std::size_t> dims(mc.stack_depth + 1, mc.summary_dim);
      dims[0] = mc.input_dim;
      enc.stack = make_simta_stack(dims, cfg.activation, rng);
    } else {
      // Pick the hidden size whose total footprint (recurrence + its share
      // of head/single/placeholder widths) best matches the SimTA encoder.
      const LstmVariant variant = variant_of(cfg.encoder);
      const std::size_t aug_in = lstm_input_dim(mc.input_dim, variant);
      const std::size_t extra_per_h = cfg.head_hidden + mc.input_dim + 2;
      const std::size_t target =
          simta_stack_param_count(mc) + mc.summary_dim * extra_per_h;
      std::size_t h = lstm_hidden_for_parity(aug_in, target, extra_per_h, 0);
      if (h % 2 != 0) ++h;  // temporal encoding needs an even dim
      enc.lstm = make_lstm(aug_in, h, rng);
    }
    const std::size_t slot = enc.slot_dim();
    enc.single_w = glorot(mc.input_dim, slot, rng);
    enc.single_b = Matrix(1, slot);
    enc.placeholder = Matrix(1, slot);
    model.encoders.push_back(std::move(enc));
  }
  model.static_w1 = glorot(cfg.static_dim, cfg.static_embed, rng);
  model.static_b1 = Matrix(1, cfg.static_embed);
  model.static_w2 = glorot(cfg.static_embed, cfg.static_embed, rng);
  model.static_b2 = Matrix(1, cfg.static_embed);
  const std::size_t concat = model.concat_dim();
  model.head_w1 = glorot(concat, cfg.head_hidden, rng);
  model.head_b1 = Matrix(1, cfg.head_hidden);
  model.head_w2 = glorot(cfg.head_hidden, 2, rng);
  model.head_b2 = Matrix(1, 2);
  return model;
}

PredictionTask make_task(const Assessment& a, double horizon_days) {
  if (horizon_days <= 0.0) throw DataError("make_task: horizon must be positive");
  return {a.t, a.t - horizon_days, a.label};
}

Matrix fusion_forward(const FusionModel& model, const SubjectRecord& subject,
                      const PredictionTask& task, FusionCache* cache) {
  if (!(task.cutoff < task.assessment_t))
    throw DataError("fusion_forward: cutoff must precede the assessment time");
  if (subject.statics.size() != model.cfg.static_dim)
    throw DimensionError("fusion_forward: subject has " +
                         std::to_string(subject.statics.size()) +
                         " static features, model expects " +
                         std::to_string(model.cfg.static_dim));
  if (cache) cache->modalities.assign(model.encoders.size(), ModalityCache{});

  const Activation act = model.cfg.activation;
  bool any_serial = false;
  std::vector<Matrix> parts(model.encoders.size());
  for (std::size_t m = 0; m < model.encoders.size(); ++m) {
    const ModalityEncoder& enc = model.encoders[m];
    const AsyncSeries* src = nullptr;
    if (enc.cfg.name == "interventions") {
      src = &subject.interventions;
    } else {
      auto it = subject.modalities.find(enc.cfg.name);
      if (it != subject.modalities.end()) src = &it->second;
    }
    AsyncSeries visible;
    if (src && src->steps() > 0) {
      if (src->values.cols() != enc.cfg.input_dim)
        throw DimensionError("fusion_forward: modality '" + enc.cfg.name + "' has " +
                             std::to_string(src->values.cols()) +
                             " channels, model expects " +
                             std::to_string(enc.cfg.input_dim));
      visible = src->truncated(task.cutoff);
    }

    ModalityCache mc;
    if (visible.steps() == 0) {
      mc.route = ModalityRoute::Absent;
      parts[m] = enc.placeholder;
    } else {
      any_serial = true;
      if (enc.cfg.normalize && model.norm.fitted) {
        visible.values = normalize_values(visible.values, model.norm.mean.at(enc.cfg.name),
                                          model.norm.stdev.at(enc.cfg.name));
      }
      const TemporalEncoding te{enc.slot_dim(), model.cfg.temporal_base};
      const double delta_t = task.assessment_t - visible.timestamps.back();
      const std::vector<double> encoded = temporal_encode(delta_t, te);
      Matrix part;
      if (visible.steps() == 1) {
        mc.route = ModalityRoute::Single;
        part = add_row_broadcast(matmul(row(visible.values, 0), enc.single_w),
                                 enc.single_b);
      } else {
        mc.route = ModalityRoute::Serial;
        if (enc.kind == SerialEncoderKind::SimTA) {
          part = stack_forward(visible, enc.stack, cache ? &mc.stack : nullptr);
        } else {
          part = lstm_forward(visible, enc.lstm, variant_of(enc.kind),
                              cache ? &mc.lstm : nullptr);
        }
      }
      for (std::size_t j = 0; j < part.cols(); ++j) part(0, j) += encoded[j];
      parts[m] = std::move(part);
      mc.visible = std::move(visible);
    }
    if (cache) cache->modalities[m] = std::move(mc);
  }
  if (!any_serial)
    throw InsufficientDataError("fusion_forward: no serial data visible at cutoff for '" +
                                subject.id + "'");

  Matrix statics(1, model.cfg.static_dim);
  for (std::size_t c = 0; c < subject.statics.size(); ++c)
    statics(0, c) = subject.statics[c];
  if (model.norm.fitted) {
    for (std::size_t c = 0; c < statics.cols(); ++c)
      statics(0, c) = (statics(0, c) - model.norm.static_mean[c]) /
                      std::max(model.norm.static_stdev[c], 1e-8);
  }
  Matrix static_z1 = add_row_broadcast(matmul(statics, model.static_w1), model.static_b1);
  Matrix static_emb = add_row_broadcast(
      matmul(apply_activation(act, static_z1), model.static_w2), model.static_b2);

  Matrix concat(1, model.concat_dim());
  std::size_t off = 0;
  for (const Matrix& p : parts) {
    for (std::size_t j = 0; j < p.cols(); ++j) concat(0, off + j) = p(0, j);
    off += p.cols();
  }
  for (std::size_t j = 0; j < static_emb.cols(); ++j)
    concat(0, off + j) = static_emb(0, j);

  Matrix head_z1 = add_row_broadcast(matmul(concat, model.head_w1), model.head_b1);
  Matrix scores = add_row_broadcast(
      matmul(apply_activation(act, head_z1), model.head_w2), model.head_b2);

  if (cache) {
    cache->statics_norm = std::move(statics);
    cache->static_z1 = std::move(static_z1);
    cache->concat = std::move(concat);
    cache->head_z1 = std::move(head_z1);
  }
  return scores;
}

namespace {

ModalityEncoderGrads zero_encoder_grads(const ModalityEncoder& enc) {
  ModalityEncoderGrads g;
  if (enc.kind == SerialEncoderKind::SimTA) {
    g.stack.modules.resize(enc.stack.modules.size());
    for (std::size_t i = 0; i < enc.stack.modules.size(); ++i) {
      const auto& m = enc.stack.modules[i];
      g.stack.modules[i].W = Matrix(m.W.rows(), m.W.cols());
      g.stack.modules[i].b = Matrix(1, m.b.cols());
    }
  } else {
    auto z = [](const Matrix& m) { return Matrix(m.rows(), m.cols()); };
    g.lstm.w_xi = z(enc.lstm.w_xi); g.lstm.w_hi = z(enc.lstm.w_hi); g.lstm.b_i = z(enc.lstm.b_i);
    g.lstm.w_xf = z(enc.lstm.w_xf); g.lstm.w_hf = z(enc.lstm.w_hf); g.lstm.b_f = z(enc.lstm.b_f);
    g.lstm.w_xg = z(enc.lstm.w_xg); g.lstm.w_hg = z(enc.lstm.w_hg); g.lstm.b_g = z(enc.lstm.b_g);
    g.lstm.w_xo = z(enc.lstm.w_xo); g.lstm.w_ho = z(enc.lstm.w_ho); g.lstm.b_o = z(enc.lstm.b_o);
  }
  g.single_w = Matrix(enc.single_w.rows(), enc.single_w.cols());
  g.single_b = Matrix(1, enc.single_b.cols());
  g.placeholder = Matrix(1, enc.placeholder.cols());
  return g;
}

}  // namespace

FusionGrads fusion_backward(const FusionModel& model, const FusionCache& cache,
                            const Matrix& d_scores) {
  const Activation act = model.cfg.activation;
  FusionGrads grads;
  for (const auto& enc : model.encoders) grads.encoders.push_back(zero_encoder_grads(enc));

  Matrix head_a1 = apply_activation(act, cache.head_z1);
  grads.head_w2 = matmul(transpose(head_a1), d_scores);
  grads.head_b2 = d_scores;
  Matrix d_head_a1 = matmul(d_scores, transpose(model.head_w2));
  Matrix d_head_z1 = hadamard(d_head_a1, apply_activation_deriv(act, cache.head_z1));
  grads.head_w1 = matmul(transpose(cache.concat), d_head_z1);
  grads.head_b1 = d_head_z1;
  Matrix d_concat = matmul(d_head_z1, transpose(model.head_w1));

  std::size_t off = 0;
  for (std::size_t m = 0; m < model.encoders.size(); ++m) {
    const ModalityEncoder& enc = model.encoders[m];
    const ModalityCache& mc = cache.modalities[m];
    const std::size_t slot = enc.slot_dim();
    Matrix d_part(1, slot);
    for (std::size_t j = 0; j < slot; ++j) d_part(0, j) = d_concat(0, off + j);
    off += slot;

    switch (mc.route) {
      case ModalityRoute::Absent:
        grads.encoders[m].placeholder = d_part;
        break;
      case ModalityRoute::Single: {
        grads.encoders[m].single_w = matmul(transpose(row(mc.visible.values, 0)), d_part);
        grads.encoders[m].single_b = d_part;
        break;
      }
      case ModalityRoute::Serial: {
        if (enc.kind == SerialEncoderKind::SimTA) {
          grads.encoders[m].stack = stack_backward(enc.stack, mc.stack, d_part);
        } else {
          grads.encoders[m].lstm = lstm_backward(enc.lstm, mc.lstm, d_part);
        }
        break;
      }
    }
  }

  Matrix d_emb(1, model.cfg.static_embed);
  for (std::size_t j = 0; j < d_emb.cols(); ++j) d_emb(0, j) = d_concat(0, off + j);
  Matrix static_a1 = apply_activation(act, cache.static_z1);
  grads.static_w2 = matmul(transpose(static_a1), d_emb);
  grads.static_b2 = d_emb;
  Matrix d_static_a1 = matmul(d_emb, transpose(model.static_w2));
  Matrix d_static_z1 = hadamard(d_static_a1, apply_activation_deriv(act, cache.static_z1));
  grads.static_w1 = matmul(transpose(cache.statics_norm), d_static_z1);
  grads.static_b1 = d_static_z1;
  return grads;
}

double predict_proba(const FusionModel& model, const SubjectRecord& subject,
                     const PredictionTask& task) {
  Matrix scores = fusion_forward(model, subject, task, nullptr);
  const double a = scores(0, 0), b = scores(0, 1);
  const double m = a > b ? a : b;
  const double z = std::exp(a - m) + std::exp(b - m);
  return std::exp(b - m) / z;
}

std::vector<ParamRef> param_refs(FusionModel& model) {
  std::vector<ParamRef> refs;
  for (auto& enc : model.encoders) {
    const std::string base = "enc." + enc.cfg.name;
    if (enc.kind == SerialEncoderKind::SimTA) {
      auto stack_refs = param_refs(enc.stack, base);
      refs.insert(refs.end(), stack_refs.begin(), stack_refs.end());
    } else {
      auto lstm_refs = param_refs(enc.lstm, base);
      refs.insert(refs.end(), lstm_refs.begin(), lstm_refs.end());
    }
    refs.push_back(param_ref(base + ".single_w", enc.single_w));
    refs.push_back(param_ref(base + ".single_b", enc.single_b));
    refs.push_back(param_ref(base + ".placeholder", enc.placeholder));
  }
  refs.push_back(param_ref("static.w1", model.static_w1));
  refs.push_back(param_ref("static.b1", model.static_b1));
  refs.push_back(param_ref("static.w2", model.static_w2));
  refs.push_back(param_ref("static.b2", model.static_b2));
  refs.push_back(param_ref("head.w1", model.head_w1));
  refs.push_back(param_ref("head.b1", model.head_b1));
  refs.push_back(param_ref("head.w2", model.head_w2));
  refs.push_back(param_ref("head.b2", model.head_b2));
  return refs;
}

std::vector<ParamRef> grad_refs(FusionGrads& grads, const FusionModel& model) {
  std::vector<ParamRef> refs;
  for (std::size_t m = 0; m < grads.encoders.size(); ++m) {
    auto& g = grads.encoders[m];
    const std::string base = "enc." + model.encoders[m].cfg.name;
    if (model.encoders[m].kind == SerialEncoderKind::SimTA) {
      auto stack_refs = grad_refs(g.stack, base);
      refs.insert(refs.end(), stack_refs.begin(), stack_refs.end());
    } else {
      auto lstm_refs = grad_refs(g.lstm, base);
      refs.insert(refs.end(), lstm_refs.begin(), lstm_refs.end());
    }
    refs.push_back(param_ref(base + ".single_w", g.single_w));
    refs.push_back(param_ref(base + ".single_b", g.single_b));
    refs.push_back(param_ref(base + ".placeholder", g.placeholder));
  }
  refs.push_back(param_ref("static.w1", grads.static_w1));
  refs.push_back(param_ref("static.b1", grads.static_b1));
  refs.push_back(param_ref("static.w2", grads.static_w2));
  refs.push_back(param_ref("static.b2", grads.static_b2));
  refs.push_back(param_ref("head.w1", grads.head_w1));
  refs.push_back(param_ref("head.b1", grads.head_b1));
  refs.push_back(param_ref("head.w2", grads.head_w2));
  refs.push_back(param_ref("head.b2", grads.head_b2));
  return refs;
}

void fit_normalization(FusionModel& model, const Cohort& cohort,
                       const std::vector<std::size_t>& train_subjects) {
  NormStats norm;
  for (const auto& enc : model.encoders) {
    if (!enc.cfg.normalize) continue;
    std::vector<double> sum(enc.cfg.input_dim, 0.0), sumsq(enc.cfg.input_dim, 0.0);
    double count = 0.0;
    for (std::size_t s : train_subjects) {
      const SubjectRecord& rec = cohort.subjects.at(s);
      auto it = rec.modalities.find(enc.cfg.name);
      if (it == rec.modalities.end()) continue;
      const Matrix& v = it->second.values;
      for (std::size_t i = 0; i < v.rows(); ++i)
        for (std::size_t c = 0; c < v.cols(); ++c) {
          sum[c] += v(i, c);
          sumsq[c] += v(i, c) * v(i, c);
        }
      count += static_cast<double>(v.rows());
    }
    std::vector<double> mean(enc.cfg.input_dim, 0.0), stdev(enc.cfg.input_dim, 1.0);
    if (count > 0.0) {
      for (std::size_t c = 0; c < mean.size(); ++c) {
        mean[c] = sum[c] / count;
        const double var = sumsq[c] / count - mean[c] * mean[c];
        stdev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
      }
    }
    norm.mean[enc.cfg.name] = std::move(mean);
    norm.stdev[enc.cfg.name] = std::move(stdev);
  }

  norm.static_mean.assign(model.cfg.static_dim, 0.0);
  norm.static_stdev.assign(model.cfg.static_dim, 1.0);
  if (!train_subjects.empty()) {
    std::vector<double> sum(model.cfg.static_dim, 0.0), sumsq(model.cfg.static_dim, 0.0);
    for (std::size_t s : train_subjects) {
      const auto& st = cohort.subjects.at(s).statics;
      for (std::size_t c = 0; c < st.size(); ++c) {
        sum[c] += st[c];
        sumsq[c] += st[c] * st[c];
      }
    }
    const double n = static_cast<double>(train_subjects.size());
    for (std::size_t c = 0; c < sum.size(); ++c) {
      norm.static_mean[c] = sum[c] / n;
      const double var = sumsq[c] / n - norm.static_mean[c] * norm.static_mean[c];
      norm.static_stdev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
  }
  norm.fitted = true;
  model.norm = std::move(norm);
}

void save_checkpoint(const FusionModel& model, const std::filesystem::path& path) {
  json cfg;
  cfg["encoder"] = encoder_kind_name(model.cfg.encoder);
  cfg["static_dim"] = model.cfg.static_dim;
  cfg["static_embed"] = model.cfg.static_embed;
  cfg["head_hidden"] = model.cfg.head_hidden;
  cfg["horizon_days"] = model.cfg.horizon_days;
  cfg["temporal_base"] = model.cfg.temporal_base;
  cfg["activation"] = activation_name(model.cfg.activation);
  cfg["modalities"] = json::array();
  for (const auto& mc : model.cfg.modalities) {
    cfg["modalities"].push_back({{"name", mc.name},
                                 {"input_dim", mc.input_dim},
                                 {"summary_dim", mc.summary_dim},
                                 {"stack_depth", mc.stack_depth},
                                 {"normalize", mc.normalize}});
  }

  json norm;
  norm["fitted"] = model.norm.fitted;
  norm["static_mean"] = model.norm.static_mean;
  norm["static_stdev"] = model.norm.static_stdev;
  norm["modalities"] = json::object();
  for (const auto& [name, mean] : model.norm.mean)
    norm["modalities"][name] = {{"mean", mean}, {"stdev", model.norm.stdev.at(name)}};

  json params = json::object();
  FusionModel& mutable_model = const_cast<FusionModel&>(model);
  for (const ParamRef& r : param_refs(mutable_model))
    params[r.name] = std::vector<double>(r.values, r.values + r.size);

  json j = {{"format_version", kCheckpointVersion},
            {"kind", "fusion"},
            {"config", std::move(cfg)},
            {"norm", std::move(norm)},
            {"seed", model.init_seed},
            {"params", std::move(params)}};
  write_file_atomic(path, j.dump());
}

FusionModel load_checkpoint(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError("checkpoint parse error: " + std::string(e.what()));
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion)
      throw DataError("checkpoint format version " + std::to_string(version) +
                      " not supported (expected " + std::to_string(kCheckpointVersion) +
                      ")");
    if (j.at("kind").get<std::string>() != "fusion")
      throw DataError("checkpoint kind is not 'fusion'");

    const json& cj = j.at("config");
    FusionConfig cfg;
    cfg.encoder = encoder_kind_from_name(cj.at("encoder").get<std::string>());
    cfg.static_dim = cj.at("static_dim").get<std::size_t>();
    cfg.static_embed = cj.at("static_embed").get<std::size_t>();
    cfg.head_hidden = cj.at("head_hidden").get<std::size_t>();
    cfg.horizon_days = cj.at("horizon_days").get<double>();
    cfg.temporal_base = cj.at("temporal_base").get<double>();
    cfg.activation = activation_from_name(cj.at("activation").get<std::string>());
    for (const json& mj : cj.at("modalities")) {
      ModalityConfig mc;
      mc.name = mj.at("name").get<std::string>();
      mc.input_dim = mj.at("input_dim").get<std::size_t>();
      mc.summary_dim = mj.at("summary_dim").get<std::size_t>();
      mc.stack_depth = mj.at("stack_depth").get<std::size_t>();
      mc.normalize = mj.at("normalize").get<bool>();
      cfg.modalities.push_back(std::move(mc));
    }

    Rng rng(j.at("seed").get<std::uint64_t>());
    FusionModel model = make_fusion_model(cfg, rng);

    const json& params = j.at("params");
    for (const ParamRef& r : param_refs(model)) {
      if (!params.contains(r.name))
        throw DataError("checkpoint missing parameter group '" + r.name + "'");
      const auto vals = params.at(r.name).get<std::vector<double>>();
      if (vals.size() != r.size)
        throw DataError("checkpoint parameter '" + r.name + "' has " +
                        std::to_string(vals.size()) + " values, expected " +
                        std::to_string(r.size));
      std::copy(vals.begin(), vals.end(), r.values);
    }

    const json& nj = j.at("norm");
    model.norm.fitted = nj.at("fitted").get<bool>();
    model.norm.static_mean = nj.at("static_mean").get<std::vector<double>>();
    model.norm.static_stdev = nj.at("static_stdev").get<std::vector<double>>();
    for (const auto& [name, mj] : nj.at("modalities").items()) {
      model.norm.mean[name] = mj.at("mean").get<std::vector<double>>();
      model.norm.stdev[name] = mj.at("stdev").get<std::vector<double>>();
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError("checkpoint schema error: " + std::string(e.what()));
  }
}

}  // namespace simta
