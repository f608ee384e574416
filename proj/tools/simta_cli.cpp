// Command-line front end: data generation, training, comparisons, gradient
// verification and survival reports. Exit codes: 0 success, 2 usage,
// 3 I/O, 4 data/schema, 5 numeric.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "simta/cohort.hpp"
#include "simta/datagen.hpp"
#include "simta/error.hpp"
#include "simta/fusion.hpp"
#include "simta/grad_check.hpp"
#include "simta/io_util.hpp"
#include "simta/losses.hpp"
#include "simta/survival.hpp"
#include "simta/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace simta;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kDataFormatVersion = 1;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunContext {
  std::string command;
  json config = json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& out_dir, const RunContext& ctx) {
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started)
          .count();
  json j = {
      {"command", ctx.command},
      {"config", ctx.config},
      {"seed", ctx.seed},
      {"inputs", ctx.input_digests},
      {"tool_version", kToolVersion},
      {"format_version", kDataFormatVersion},
      {"wall_clock_seconds", wall},
  };
  write_file_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + out + ": " + ec.message());
  return dir;
}

void write_metric_csv(const fs::path& path, const MetricLog& log) {
  std::ostringstream csv;
  csv << "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < log.train_loss.size(); ++e)
    csv << (e + 1) << ',' << fmt(log.train_loss[e]) << ',' << fmt(log.val_loss[e])
        << '\n';
  write_file_atomic(path, csv.str());
}

void write_preds_csv(const fs::path& path, const std::vector<PredRecord>& preds) {
  std::ostringstream csv;
  csv << "subject_id,assessment_t,probability,label\n";
  for (const auto& p : preds)
    csv << p.subject_id << ',' << fmt(p.assessment_t) << ',' << fmt(p.probability)
        << ',' << p.label << '\n';
  write_file_atomic(path, csv.str());
}

// ---------------------------------------------------------------------------
// gen

struct GenSynthOptions {
  std::uint64_t seed = 0;
  std::string out;
  TrigGenConfig config;
};

int run_gen_synth(const GenSynthOptions& opt) {
  RunContext ctx;
  ctx.command = "gen synth";
  ctx.seed = opt.seed;
  ctx.config = {
      {"count", opt.config.count},
      {"components", opt.config.n_components},
      {"eta", opt.config.eta},
      {"train_fraction", opt.config.train_fraction},
      {"amp", {opt.config.amp_lo, opt.config.amp_hi}},
      {"omega", {opt.config.omega_lo, opt.config.omega_hi}},
      {"omega_log_uniform", opt.config.omega_log_uniform},
      {"clutter_components", opt.config.n_clutter},
      {"clutter_omega", {opt.config.clutter_lo, opt.config.clutter_hi}},
      {"phase", {opt.config.phase_lo, opt.config.phase_hi}},
      {"offset", {opt.config.offset_lo, opt.config.offset_hi}},
  };
  fs::path dir = prepare_out_dir(opt.out);
  Rng rng(opt.seed);
  auto series = gen_trig_series(rng, opt.config);
  save_benchmark(series, dir / "synthetic.jsonl");
  ctx.input_digests["synthetic.jsonl"] = file_digest(dir / "synthetic.jsonl");
  write_manifest(dir, ctx);
  std::cout << "wrote " << series.size() << " series to "
            << (dir / "synthetic.jsonl").string() << "\n";
  return 0;
}

struct GenCohortOptions {
  std::uint64_t seed = 0;
  std::string out;
  CohortGenConfig config;
};

int run_gen_cohort(const GenCohortOptions& opt) {
  RunContext ctx;
  ctx.command = "gen cohort";
  ctx.seed = opt.seed;
  ctx.config = {
      {"subjects", opt.config.n_subjects},
      {"folds", opt.config.n_folds},
      {"lab_dim", opt.config.lab_dim},
      {"imaging_dim", opt.config.imaging_dim},
      {"static_dim", opt.config.static_dim},
      {"horizon_days", opt.config.horizon_days},
      {"w_lab", opt.config.effect.w_lab},
      {"w_imaging", opt.config.effect.w_imaging},
      {"w_static", opt.config.effect.w_static},
      {"effect_scale", opt.config.effect.scale},
      {"single_imaging_prob", opt.config.single_imaging_prob},
  };
  fs::path dir = prepare_out_dir(opt.out);
  Rng rng(opt.seed);
  Cohort cohort = gen_mia_cohort(rng, opt.config);
  save_cohort(cohort, dir / "cohort.jsonl");
  ctx.input_digests["cohort.jsonl"] = file_digest(dir / "cohort.jsonl");
  write_manifest(dir, ctx);
  std::size_t assessments = 0;
  for (const auto& rec : cohort.subjects) assessments += rec.assessments.size();
  std::cout << "wrote " << cohort.subjects.size() << " subjects (" << assessments
            << " assessments, " << cohort.n_folds() << " folds) to "
            << (dir / "cohort.jsonl").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  TrainConfig config;
  std::string data;
  std::string out;
  int fold = -1;  // fusion: -1 = all folds
};

json summary_base(const TrainOptions& opt) {
  return {
      {"model", opt.config.model},
      {"epochs", opt.config.epochs},
      {"batch_size", opt.config.batch_size},
      {"lr", opt.config.lr},
      {"seed", opt.config.seed},
      {"max_interval", opt.config.max_interval},
      {"hidden", opt.config.hidden},
      {"ablate", opt.config.ablate},
      {"horizon_days", opt.config.horizon_days},
      {"data", opt.data},
  };
}

void save_synthetic_checkpoint(SyntheticModel& model, const fs::path& path,
                               std::uint64_t seed) {
  json params = json::object();
  for (const ParamRef& r : param_refs(model))
    params[r.name] = std::vector<double>(r.values, r.values + r.size);
  json j = {{"format_version", kDataFormatVersion},
            {"kind", std::holds_alternative<SimTARegressor>(model) ? "simta_regressor"
                                                                   : "lstm_regressor"},
            {"seed", seed},
            {"params", params}};
  std::visit(
      [&](auto& reg) {
        j["input_mean"] = reg.input_mean;
        j["input_std"] = reg.input_std;
      },
      model);
  write_file_atomic(path, j.dump());
}

int run_train(const TrainOptions& opt) {
  RunContext ctx;
  ctx.command = "train";
  ctx.seed = opt.config.seed;
  ctx.config = summary_base(opt);
  ctx.input_digests[opt.data] = file_digest(opt.data);
  fs::path dir = prepare_out_dir(opt.out);

  if (opt.config.model == "fusion" || opt.fold >= 0) {
    Cohort cohort = load_cohort(opt.data);
    std::vector<int> folds;
    if (opt.fold >= 0) {
      folds.push_back(opt.fold);
    } else {
      for (int f = 0; f < cohort.n_folds(); ++f) folds.push_back(f);
    }
    std::vector<PredRecord> pooled;
    json fold_summary = json::array();
    for (int f : folds) {
      FoldResult res = train_fold(cohort, f, opt.config);
      const std::string tag = "fold" + std::to_string(f);
      write_metric_csv(dir / ("metrics_" + tag + ".csv"), res.log);
      save_checkpoint(res.model, dir / ("checkpoint_" + tag + ".json"));
      pooled.insert(pooled.end(), res.preds.begin(), res.preds.end());
      fold_summary.push_back({{"fold", f},
                              {"auc", res.auc_value},
                              {"final_train_loss", res.log.train_loss.back()},
                              {"final_val_loss", res.log.val_loss.back()},
                              {"skipped_tasks", res.skipped_tasks}});
      std::cout << "fold " << f << ": auc=" << res.auc_value << "\n";
    }
    write_preds_csv(dir / "preds.csv", pooled);
    std::vector<double> probs;
    std::vector<int> labels;
    for (const auto& p : pooled) {
      probs.push_back(p.probability);
      labels.push_back(p.label);
    }
    json summary = summary_base(opt);
    summary["folds"] = fold_summary;
    if (folds.size() > 1) summary["auc_pooled"] = auc(probs, labels);
    write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
    write_manifest(dir, ctx);
    return 0;
  }

  auto series = load_benchmark(opt.data);
  SyntheticResult res = train_synthetic(series, opt.config);
  write_metric_csv(dir / "metrics.csv", res.log);
  save_synthetic_checkpoint(res.model, dir / "checkpoint.json", opt.config.seed);
  json summary = summary_base(opt);
  summary["final_train_loss"] = res.log.train_loss.back();
  summary["final_val_loss"] = res.log.val_loss.back();
  summary["param_count"] = synthetic_param_count(res.model);
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, ctx);
  std::cout << opt.config.model << ": final val mse " << res.log.val_loss.back() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

unsigned compare_threads() {
  if (const char* env = std::getenv("SIMTA_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

struct CompareOptions {
  std::string suite;
  std::string data;
  std::string out;
  TrainConfig config;
};

// AUC values reported for the original (private) clinical cohort, shown as a
// reference column next to the synthetic-cohort results.
const std::map<std::string, double> kReferenceAuc = {
    {"lstm", 0.71},   {"lstm_i", 0.71},           {"lstm_s", 0.70},
    {"fusion", 0.80}, {"fusion_wo_radiomics", 0.47}, {"fusion_wo_lab", 0.58},
};

int run_compare(const CompareOptions& opt) {
  RunContext ctx;
  ctx.command = "compare --suite " + opt.suite;
  ctx.seed = opt.config.seed;
  ctx.config = {{"suite", opt.suite},   {"data", opt.data},
                {"epochs", opt.config.epochs}, {"lr", opt.config.lr},
                {"seed", opt.config.seed},     {"batch_size", opt.config.batch_size},
                {"max_interval", opt.config.max_interval}};
  ctx.input_digests[opt.data] = file_digest(opt.data);
  fs::path dir = prepare_out_dir(opt.out);
  const unsigned threads = compare_threads();

  if (opt.suite == "synthetic") {
    auto series = load_benchmark(opt.data);
    Comparison cmp = run_synthetic_comparison(series, opt.config, threads);
    std::ostringstream csv, md;
    csv << "variant,final_val_mse,final_train_mse\n";
    md << "| variant | final val MSE |\n|---|---|\n";
    for (const auto& e : cmp.entries) {
      csv << e.name << ',' << fmt(e.final_metric) << ',' << fmt(e.log.train_loss.back())
          << '\n';
      md << "| " << e.name << " | " << fmt(e.final_metric) << " |\n";
      write_metric_csv(dir / ("curves_" + e.name + ".csv"), e.log);
    }
    write_file_atomic(dir / "comparison.csv", csv.str());
    write_file_atomic(dir / "comparison.md", md.str());
    write_manifest(dir, ctx);
    std::cout << csv.str();
    return 0;
  }
  if (opt.suite == "cohort") {
    Cohort cohort = load_cohort(opt.data);
    Comparison cmp = run_cohort_comparison(cohort, opt.config, threads);
    std::ostringstream csv, md;
    csv << "variant,auc_pooled,auc_fold_mean,reference_auc\n";
    md << "| variant | AUC (pooled) | AUC (fold mean) | reference AUC |\n|---|---|---|---|\n";
    for (const auto& e : cmp.entries) {
      const double ref = kReferenceAuc.at(e.name);
      csv << e.name << ',' << fmt(e.final_metric) << ',' << fmt(e.fold_mean) << ','
          << fmt(ref) << '\n';
      md << "| " << e.name << " | " << fmt(e.final_metric) << " | " << fmt(e.fold_mean)
         << " | " << fmt(ref) << " |\n";
      write_metric_csv(dir / ("curves_" + e.name + ".csv"), e.log);
    }
    write_file_atomic(dir / "comparison.csv", csv.str());
    write_file_atomic(dir / "comparison.md", md.str());
    write_preds_csv(dir / "preds.csv", cmp.pooled_preds);
    write_manifest(dir, ctx);
    std::cout << csv.str();
    return 0;
  }
  throw DataError("unknown suite: " + opt.suite);
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradCheckCase {
  std::string name;
  std::string module;  // simta | lstm | fusion | numerics
  std::function<GradCheckReport()> run;
};

std::vector<GradCheckCase> gradcheck_registry(bool inject_fault);

int run_gradcheck(const std::string& module, bool inject_fault) {
  bool all_passed = true;
  std::size_t ran = 0;
  for (const auto& check : gradcheck_registry(inject_fault)) {
    if (module != "all" && check.module != module) continue;
    ++ran;
    GradCheckReport report = check.run();
    all_passed &= report.passed;
    std::printf("%-28s max_rel_err=%.3e  %s\n", check.name.c_str(),
                report.max_rel_err, report.passed ? "PASS" : "FAIL");
  }
  if (ran == 0) throw DataError("no gradient checks match module '" + module + "'");
  if (!all_passed) throw NumericError("gradient verification failed");
  return 0;
}

// ---------------------------------------------------------------------------
// survival

struct SurvivalOptions {
  std::string preds;
  std::string cohort;
  std::string out;
  double cutoff = 0.5;
};

std::string group_name(RiskGroup g) {
  return g == RiskGroup::Low ? "low" : "high";
}

void write_km_csv(const fs::path& path, const KmCurve& low, const KmCurve& high) {
  std::ostringstream csv;
  csv << "time,survival,at_risk,events,group\n";
  for (const auto& p : low.points)
    csv << fmt(p.time) << ',' << fmt(p.survival) << ',' << p.at_risk << ',' << p.events
        << ",low\n";
  for (const auto& p : high.points)
    csv << fmt(p.time) << ',' << fmt(p.survival) << ',' << p.at_risk << ',' << p.events
        << ",high\n";
  write_file_atomic(path, csv.str());
}

void write_km_svg(const fs::path& path, const KmCurve& low, const KmCurve& high,
                  const std::string& title) {
  const double width = 640, height = 420, margin = 50;
  double t_max = 1.0;
  for (const auto& p : low.points) t_max = std::max(t_max, p.time);
  for (const auto& p : high.points) t_max = std::max(t_max, p.time);
  auto x_of = [&](double t) { return margin + (width - 2 * margin) * t / t_max; };
  auto y_of = [&](double s) { return margin + (height - 2 * margin) * (1.0 - s); };
  auto step_path = [&](const KmCurve& curve) {
    std::ostringstream d;
    double s = 1.0;
    d << "M " << x_of(0) << ' ' << y_of(1.0);
    for (const auto& p : curve.points) {
      d << " L " << x_of(p.time) << ' ' << y_of(s);
      d << " L " << x_of(p.time) << ' ' << y_of(p.survival);
      s = p.survival;
    }
    d << " L " << x_of(t_max) << ' ' << y_of(s);
    return d.str();
  };
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
      << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>"
      << title << "</text>\n";
  svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
      << width - margin << "' y2='" << height - margin << "' stroke='black'/>\n";
  svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
      << height - margin << "' stroke='black'/>\n";
  svg << "<path d='" << step_path(low)
      << "' fill='none' stroke='#1f77b4' stroke-width='2'/>\n";
  svg << "<path d='" << step_path(high)
      << "' fill='none' stroke='#d62728' stroke-width='2'/>\n";
  svg << "<text x='" << width - margin - 120 << "' y='" << margin + 10
      << "' fill='#1f77b4'>low risk</text>\n";
  svg << "<text x='" << width - margin - 120 << "' y='" << margin + 28
      << "' fill='#d62728'>high risk</text>\n";
  svg << "</svg>\n";
  write_file_atomic(path, svg.str());
}

int run_survival(const SurvivalOptions& opt) {
  RunContext ctx;
  ctx.command = "survival";
  ctx.config = {{"preds", opt.preds}, {"cohort", opt.cohort}, {"cutoff", opt.cutoff}};
  ctx.input_digests[opt.preds] = file_digest(opt.preds);
  ctx.input_digests[opt.cohort] = file_digest(opt.cohort);
  fs::path dir = prepare_out_dir(opt.out);

  // mean out-of-fold probability per subject
  std::map<std::string, std::pair<double, std::size_t>> acc;
  {
    std::istringstream in(read_file(opt.preds));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no == 1 || line.empty()) continue;  // header
      std::istringstream row(line);
      std::string subject, t, prob, label;
      if (!std::getline(row, subject, ',') || !std::getline(row, t, ',') ||
          !std::getline(row, prob, ','))
        throw DataError("preds parse error at line " + std::to_string(line_no));
      try {
        acc[subject].first += std::stod(prob);
      } catch (const std::exception&) {
        throw DataError("preds parse error at line " + std::to_string(line_no) +
                        ": bad probability");
      }
      acc[subject].second += 1;
    }
  }
  if (acc.empty()) throw DataError("no predictions in " + opt.preds);

  Cohort cohort = load_cohort(opt.cohort);
  std::vector<double> probs;
  std::vector<const SubjectRecord*> subjects;
  for (const auto& rec : cohort.subjects) {
    auto it = acc.find(rec.id);
    if (it == acc.end()) continue;
    probs.push_back(it->second.first / static_cast<double>(it->second.second));
    subjects.push_back(&rec);
  }
  if (subjects.empty())
    throw DataError("prediction subjects do not match the cohort file");
  std::vector<RiskGroup> groups = stratify(probs, opt.cutoff);

  json out_json = {{"cutoff", opt.cutoff}};
  std::size_t n_low = 0;
  for (RiskGroup g : groups) n_low += g == RiskGroup::Low ? 1 : 0;
  out_json["n_low"] = n_low;
  out_json["n_high"] = groups.size() - n_low;

  for (const std::string endpoint : {"os", "pfs"}) {
    std::vector<SurvivalSample> low, high;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      auto it = subjects[i]->survival.find(endpoint);
      if (it == subjects[i]->survival.end()) continue;
      SurvivalSample s{it->second.duration, it->second.event, groups[i]};
      (groups[i] == RiskGroup::Low ? low : high).push_back(s);
    }
    if (low.empty() && high.empty()) continue;  // endpoint absent from this cohort
    if (low.empty() || high.empty())
      throw DataError("survival: stratification left one " + endpoint +
                      " group empty; log-rank is inapplicable");
    KmCurve low_curve = km_curve(low);
    KmCurve high_curve = km_curve(high);
    write_km_csv(dir / ("km_" + endpoint + ".csv"), low_curve, high_curve);
    write_km_svg(dir / ("km_" + endpoint + ".svg"), low_curve, high_curve,
                 endpoint == "os" ? "overall survival" : "progression-free survival");
    LogrankResult lr = logrank_test(low, high);
    out_json[endpoint] = {{"chi_square", lr.chi_square},
                          {"p_value", lr.p_value},
                          {"n_low", low.size()},
                          {"n_high", high.size()}};
    std::cout << endpoint << ": chi2=" << lr.chi_square << " p=" << lr.p_value << "\n";
  }
  write_file_atomic(dir / "logrank.json", out_json.dump(2) + "\n");
  write_manifest(dir, ctx);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// gradcheck registry

namespace {

AsyncSeries gc_series(std::size_t t_len, std::size_t channels, Rng& rng) {
  AsyncSeries s;
  s.values = Matrix(t_len, channels);
  for (double& v : s.values) v = rng.uniform(-1, 1);
  double t = 0.0;
  for (std::size_t i = 0; i < t_len; ++i) {
    s.timestamps.push_back(t);
    t += rng.uniform(0.1, 2.0);
  }
  return s;
}

SubjectRecord gc_subject(Rng& rng, bool single_imaging, bool drop_interventions) {
  SubjectRecord rec;
  rec.id = "gc";
  rec.statics = {0.3, -0.5, 0.9, 0.1};
  rec.modalities["lab"] = gc_series(5, 3, rng);
  for (std::size_t i = 0; i < 5; ++i)
    rec.modalities["lab"].timestamps[i] = 5.0 + 20.0 * static_cast<double>(i);
  AsyncSeries imaging = gc_series(single_imaging ? 1 : 3, 5, rng);
  for (std::size_t i = 0; i < imaging.timestamps.size(); ++i)
    imaging.timestamps[i] = 10.0 + 30.0 * static_cast<double>(i);
  rec.modalities["imaging"] = imaging;
  if (!drop_interventions) {
    AsyncSeries iv;
    iv.timestamps = {3.0, 40.0};
    iv.values = Matrix(2, 1, 1.0);
    rec.interventions = iv;
  }
  return rec;
}

FusionConfig gc_fusion_config() {
  FusionConfig cfg;
  cfg.modalities = {
      {"lab", 3, 4, 1, true},
      {"imaging", 5, 4, 2, true},
      {"interventions", 1, 2, 1, false},
  };
  cfg.static_dim = 4;
  cfg.static_embed = 4;
  cfg.head_hidden = 6;
  return cfg;
}

GradCheckReport check_fusion(bool single_imaging, bool drop_interventions,
                             double fault) {
  Rng rng(91);
  FusionModel model = make_fusion_model(gc_fusion_config(), rng);
  Rng srng(92);
  SubjectRecord subject = gc_subject(srng, single_imaging, drop_interventions);
  const PredictionTask task{200.0, 110.0, 1};
  auto refs = param_refs(model);
  std::vector<double> flat = flatten(refs);
  auto loss_fn = [&](std::span<const double> vals) {
    FusionModel probe = model;
    assign(param_refs(probe), vals);
    return cross_entropy_loss(fusion_forward(probe, subject, task, nullptr),
                              {task.label})
        .value;
  };
  FusionCache cache;
  LossResult loss =
      cross_entropy_loss(fusion_forward(model, subject, task, &cache), {task.label});
  FusionGrads grads = fusion_backward(model, cache, loss.grad);
  std::vector<double> analytic = flatten(grad_refs(grads, model));
  analytic[0] *= fault;
  return grad_check(loss_fn, flat, analytic, 1e-5, 1e-5);
}

GradCheckReport check_simta_module(double fault) {
  Rng rng(93);
  auto params = make_simta_module(4, 3, rng);
  params.lambda_raw = 0.4;
  params.beta = -0.3;
  AsyncSeries s = gc_series(6, 4, rng);
  auto tau = s.intervals();
  Matrix coeffs(6, 3);
  for (double& v : coeffs) v = rng.uniform(-1, 1);
  auto refs = std::vector<ParamRef>{param_ref("W", params.W), param_ref("b", params.b),
                                    param_ref("lambda_raw", params.lambda_raw),
                                    param_ref("beta", params.beta)};
  std::vector<double> flat = flatten(refs);
  auto loss_fn = [&](std::span<const double> vals) {
    SimTAModuleParams probe = params;
    auto prefs = std::vector<ParamRef>{param_ref("W", probe.W), param_ref("b", probe.b),
                                       param_ref("lambda_raw", probe.lambda_raw),
                                       param_ref("beta", probe.beta)};
    assign(prefs, vals);
    Matrix out = simta_forward(s.values, tau, probe, Activation::Tanh, nullptr);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += out.data()[i] * coeffs.data()[i];
    return acc;
  };
  SimTAModuleCache cache;
  simta_forward(s.values, tau, params, Activation::Tanh, &cache);
  auto grads = simta_backward(params, Activation::Tanh, cache, coeffs);
  auto grefs = std::vector<ParamRef>{param_ref("W", grads.W), param_ref("b", grads.b),
                                     param_ref("lambda_raw", grads.lambda_raw),
                                     param_ref("beta", grads.beta)};
  std::vector<double> analytic = flatten(grefs);
  analytic[0] *= fault;
  return grad_check(loss_fn, flat, analytic, 1e-5, 1e-5);
}

GradCheckReport check_simta_stack(double fault) {
  Rng rng(94);
  SimTAStack stack = make_simta_stack({3, 4, 4}, Activation::Tanh, rng);
  AsyncSeries s = gc_series(6, 3, rng);
  Matrix coeffs(1, 4);
  for (double& v : coeffs) v = rng.uniform(-1, 1);
  auto refs = param_refs(stack, "stack");
  std::vector<double> flat = flatten(refs);
  auto loss_fn = [&](std::span<const double> vals) {
    SimTAStack probe = stack;
    auto prefs = param_refs(probe, "stack");
    assign(prefs, vals);
    Matrix summary = stack_forward(s, probe, nullptr);
    double acc = 0.0;
    for (std::size_t i = 0; i < summary.size(); ++i)
      acc += summary.data()[i] * coeffs.data()[i];
    return acc;
  };
  SimTAStackCache cache;
  stack_forward(s, stack, &cache);
  auto grads = stack_backward(stack, cache, coeffs);
  std::vector<double> analytic = flatten(grad_refs(grads, "stack"));
  analytic[0] *= fault;
  return grad_check(loss_fn, flat, analytic, 1e-5, 1e-5);
}

GradCheckReport check_lstm(LstmVariant variant, double fault) {
  Rng rng(95);
  LstmParams params = make_lstm(lstm_input_dim(3, variant), 4, rng);
  AsyncSeries s = gc_series(5, 3, rng);
  Matrix inputs = lstm_input_matrix(s, variant);
  Matrix coeffs(1, 4);
  for (double& v : coeffs) v = rng.uniform(-1, 1);
  auto refs = param_refs(params, "lstm");
  std::vector<double> flat = flatten(refs);
  auto loss_fn = [&](std::span<const double> vals) {
    LstmParams probe = params;
    assign(param_refs(probe, "lstm"), vals);
    Matrix h = lstm_forward(inputs, probe, nullptr);
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) acc += h.data()[i] * coeffs.data()[i];
    return acc;
  };
  LstmCache cache;
  lstm_forward(inputs, params, &cache);
  LstmGrads grads = lstm_backward(params, cache, coeffs);
  std::vector<double> analytic = flatten(grad_refs(grads, "lstm"));
  analytic[0] *= fault;
  return grad_check(loss_fn, flat, analytic, 1e-5, 1e-5);
}

GradCheckReport check_loss_gradient(bool cross_entropy, double fault) {
  Rng rng(96);
  if (cross_entropy) {
    Matrix logits(4, 2);
    for (double& v : logits) v = rng.uniform(-2, 2);
    std::vector<int> labels{1, 0, 1, 1};
    LossResult loss = cross_entropy_loss(logits, labels);
    std::vector<double> flat(logits.data(), logits.data() + logits.size());
    std::vector<double> analytic(loss.grad.data(), loss.grad.data() + loss.grad.size());
    analytic[0] *= fault;
    auto loss_fn = [&](std::span<const double> vals) {
      Matrix probe(4, 2);
      std::copy(vals.begin(), vals.end(), probe.data());
      return cross_entropy_loss(probe, labels).value;
    };
    return grad_check(loss_fn, flat, analytic, 1e-5, 1e-5);
  }
  Matrix pred(3, 3), target(3, 3);
  for (double& v : pred) v = rng.uniform(-2, 2);
  for (double& v : target) v = rng.uniform(-2, 2);
  LossResult loss = mse_loss(pred, target);
  std::vector<double> flat(pred.data(), pred.data() + pred.size());
  std::vector<double> analytic(loss.grad.data(), loss.grad.data() + loss.grad.size());
  analytic[0] *= fault;
  auto loss_fn = [&](std::span<const double> vals) {
    Matrix probe(3, 3);
    std::copy(vals.begin(), vals.end(), probe.data());
    return mse_loss(probe, target).value;
  };
  return grad_check(loss_fn, flat, analytic, 1e-5, 1e-5);
}

std::vector<GradCheckCase> gradcheck_registry(bool inject_fault) {
  const double fault = inject_fault ? 2.0 : 1.0;
  return {
      {"numerics.mse", "numerics", [=] { return check_loss_gradient(false, fault); }},
      {"numerics.cross_entropy", "numerics",
       [=] { return check_loss_gradient(true, fault); }},
      {"simta.module", "simta", [=] { return check_simta_module(fault); }},
      {"simta.stack", "simta", [=] { return check_simta_stack(fault); }},
      {"lstm.plain", "lstm", [=] { return check_lstm(LstmVariant::Plain, fault); }},
      {"lstm.interval", "lstm",
       [=] { return check_lstm(LstmVariant::Interval, fault); }},
      {"lstm.stamp", "lstm", [=] { return check_lstm(LstmVariant::Stamp, fault); }},
      {"fusion.end_to_end", "fusion", [=] { return check_fusion(false, false, fault); }},
      {"fusion.single_and_absent", "fusion",
       [=] { return check_fusion(true, true, fault); }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous temporal attention toolkit"};
  app.set_version_flag("--version",
                       std::string(kToolVersion) + " (data format v" +
                           std::to_string(kDataFormatVersion) + ")");
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate data sets");
  gen->require_subcommand(1);
  GenSynthOptions synth_opt;
  auto* gen_synth = gen->add_subcommand("synth", "trigonometric benchmark series");
  gen_synth->add_option("--seed", synth_opt.seed, "generation seed");
  gen_synth->add_option("--out", synth_opt.out, "output directory")->required();
  gen_synth->add_option("--count", synth_opt.config.count, "number of series");
  gen_synth->add_option("--components", synth_opt.config.n_components,
                        "sinusoids per series");
  gen_synth->add_option("--eta", synth_opt.config.eta, "noise magnitude");
  gen_synth->add_option("--train-fraction", synth_opt.config.train_fraction,
                        "train split fraction");
  gen_synth->add_option("--omega-lo", synth_opt.config.omega_lo, "slowest omega");
  gen_synth->add_option("--omega-hi", synth_opt.config.omega_hi, "fastest trend omega");
  gen_synth->add_option("--clutter-components", synth_opt.config.n_clutter,
                        "fast unpredictable sinusoids per series");

  GenCohortOptions cohort_opt;
  auto* gen_cohort = gen->add_subcommand("cohort", "synthetic multi-modal cohort");
  gen_cohort->add_option("--seed", cohort_opt.seed, "generation seed");
  gen_cohort->add_option("--out", cohort_opt.out, "output directory")->required();
  gen_cohort->add_option("--subjects", cohort_opt.config.n_subjects, "cohort size");
  gen_cohort->add_option("--folds", cohort_opt.config.n_folds, "cross-validation folds");
  gen_cohort->add_option("--w-lab", cohort_opt.config.effect.w_lab,
                         "planted lab signal weight");
  gen_cohort->add_option("--w-imaging", cohort_opt.config.effect.w_imaging,
                         "planted imaging signal weight");
  gen_cohort->add_option("--w-static", cohort_opt.config.effect.w_static,
                         "planted static signal weight");
  gen_cohort->add_option("--effect-scale", cohort_opt.config.effect.scale,
                         "label log-odds scale");
  gen_cohort->add_option("--horizon", cohort_opt.config.horizon_days,
                         "visibility horizon in days");

  // train
  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "train one model");
  train->add_option("--model", train_opt.config.model,
                    "simta|lstm|lstm_i|lstm_s|fusion")
      ->required();
  train->add_option("--data", train_opt.data, "benchmark or cohort JSONL")->required();
  train->add_option("--out", train_opt.out, "output directory")->required();
  train->add_option("--epochs", train_opt.config.epochs, "training epochs");
  train->add_option("--seed", train_opt.config.seed, "training seed");
  train->add_option("--lr", train_opt.config.lr, "Adam learning rate");
  train->add_option("--batch", train_opt.config.batch_size, "gradient accumulation");
  train->add_option("--max-interval", train_opt.config.max_interval,
                    "I: largest sampled input gap");
  train->add_option("--hidden", train_opt.config.hidden, "attention width");
  train->add_option("--ablate", train_opt.config.ablate, "radiomics|lab (fusion)");
  train->add_option("--horizon", train_opt.config.horizon_days, "cutoff horizon, days");
  train->add_option("--fold", train_opt.fold, "train a single fold (default: all)");

  // compare
  CompareOptions cmp_opt;
  auto* compare = app.add_subcommand("compare", "train all variants of one suite");
  compare->add_option("--suite", cmp_opt.suite, "synthetic|cohort")->required();
  compare->add_option("--data", cmp_opt.data, "input JSONL")->required();
  compare->add_option("--out", cmp_opt.out, "output directory")->required();
  compare->add_option("--epochs", cmp_opt.config.epochs, "training epochs");
  compare->add_option("--seed", cmp_opt.config.seed, "training seed");
  compare->add_option("--lr", cmp_opt.config.lr, "Adam learning rate");
  compare->add_option("--batch", cmp_opt.config.batch_size, "gradient accumulation");
  compare->add_option("--max-interval", cmp_opt.config.max_interval,
                      "I: largest sampled input gap");

  // gradcheck
  std::string gc_module = "all";
  bool gc_fault = false;
  auto* gradcheck = app.add_subcommand("gradcheck", "verify analytic gradients");
  gradcheck->add_option("--module", gc_module, "all|numerics|simta|lstm|fusion");
  gradcheck->add_flag("--inject-fault", gc_fault,
                      "corrupt one gradient entry (negative control)");

  // survival
  SurvivalOptions surv_opt;
  auto* survival = app.add_subcommand("survival", "risk stratification and K-M report");
  survival->add_option("--preds", surv_opt.preds, "out-of-fold predictions CSV")
      ->required();
  survival->add_option("--cohort", surv_opt.cohort, "cohort JSONL")->required();
  survival->add_option("--out", surv_opt.out, "output directory")->required();
  survival->add_option("--cutoff", surv_opt.cutoff, "probability cutoff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (gen_synth->parsed()) return run_gen_synth(synth_opt);
    if (gen_cohort->parsed()) return run_gen_cohort(cohort_opt);
    if (train->parsed()) return run_train(train_opt);
    if (compare->parsed()) return run_compare(cmp_opt);
    if (gradcheck->parsed()) return run_gradcheck(gc_module, gc_fault);
    if (survival->parsed()) return run_survival(surv_opt);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
