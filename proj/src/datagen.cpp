#include "simta/datagen.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "json.hpp"
#include "simta/error.hpp"
#include "simta/io_util.hpp"

namespace simta {

using nlohmann::json;

double TrigSeriesSpec::mean_at(double t) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < amplitude.size(); ++j)
    acc += amplitude[j] * std::sin(omega[j] * M_PI * t + phase[j]) + offset[j];
  return acc;
}

double TrigSeriesSpec::sample_at(double t, Rng& rng) const {
  return mean_at(t) + noise_level * rng.normal();
}

std::vector<BenchmarkSeries> gen_trig_series(Rng& rng, const TrigGenConfig& config) {
  if (config.count < 1) throw DataError("gen_trig_series: count must be >= 1");
  std::vector<BenchmarkSeries> out;
  out.reserve(config.count);
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(config.train_fraction * config.count));
  const std::size_t n_clutter = std::min(config.n_clutter, config.n_components);
  const std::size_t n_trend = config.n_components - n_clutter;
  for (std::size_t i = 0; i < config.count; ++i) {
    Rng item = rng.derive(i);
    BenchmarkSeries s;
    s.spec.noise_level = config.eta;
    for (std::size_t j = 0; j < config.n_components; ++j) {
      s.spec.amplitude.push_back(item.uniform(config.amp_lo, config.amp_hi));
      double omega;
      if (j < n_trend) {
        omega = config.omega_log_uniform
                    ? std::exp(item.uniform(std::log(config.omega_lo),
                                            std::log(config.omega_hi)))
                    : item.uniform(config.omega_lo, config.omega_hi);
      } else {
        omega = item.uniform(config.clutter_lo, config.clutter_hi);
      }
      s.spec.omega.push_back(omega);
      s.spec.phase.push_back(item.uniform(config.phase_lo, config.phase_hi));
      s.spec.offset.push_back(item.uniform(config.offset_lo, config.offset_hi));
    }
    s.train = i < n_train;
    out.push_back(std::move(s));
  }
  return out;
}

SampledInstance sample_instance(const TrigSeriesSpec& spec, Rng& rng, double max_interval) {
  if (max_interval <= 0.0) throw DataError("sample_instance: max interval must be > 0");
  constexpr std::size_t kPoints = 10;
  constexpr double kMinInterval = 1e-3;  // keeps intervals strictly positive
  SampledInstance inst;
  inst.inputs.values = Matrix(kPoints, 1);
  double t = rng.uniform(0.0, 10.0);
  for (std::size_t i = 0; i < kPoints; ++i) {
    inst.inputs.timestamps.push_back(t);
    inst.inputs.values(i, 0) = spec.sample_at(t, rng);
    t += rng.uniform(kMinInterval, max_interval);
  }
  const double last = inst.inputs.timestamps.back();
  for (int k = 1; k <= 3; ++k) {
    inst.target_times.push_back(last + k);
    inst.target_values.push_back(spec.sample_at(last + k, rng));
  }
  return inst;
}

void save_benchmark(const std::vector<BenchmarkSeries>& series,
                    const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& s : series) {
    json j = {
        {"spec",
         {{"alpha", s.spec.amplitude},
          {"omega", s.spec.omega},
          {"phase", s.spec.phase},
          {"offset", s.spec.offset},
          {"eta", s.spec.noise_level}}},
        {"split", s.train ? "train" : "val"},
    };
    out << j.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

std::vector<BenchmarkSeries> load_benchmark(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<BenchmarkSeries> out;
  std::string line;
  std::size_t line_no = 0;
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
      BenchmarkSeries s;
      const json& spec = j.at("spec");
      s.spec.amplitude = spec.at("alpha").get<std::vector<double>>();
      s.spec.omega = spec.at("omega").get<std::vector<double>>();
      s.spec.phase = spec.at("phase").get<std::vector<double>>();
      s.spec.offset = spec.at("offset").get<std::vector<double>>();
      s.spec.noise_level = spec.at("eta").get<double>();
      s.train = j.at("split").get<std::string>() == "train";
      const std::size_t n = s.spec.amplitude.size();
      if (s.spec.omega.size() != n || s.spec.phase.size() != n || s.spec.offset.size() != n)
        throw DataError("schema error at line " + std::to_string(line_no) +
                        ": component arrays disagree");
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw DataError("schema error at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw DataError("benchmark file " + path.string() + " is empty");
  return out;
}

}  // namespace simta
