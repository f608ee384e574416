#pragma once

#include <filesystem>
#include <vector>

#include "simta/rng.hpp"
#include "simta/series.hpp"

namespace simta {

/// One synthetic generator: a sum of N sinusoids plus per-component offsets,
/// observed under white noise of magnitude eta.
struct TrigSeriesSpec {
  std::vector<double> amplitude;  // per component
  std::vector<double> omega;      // angular factor; the sinusoid is sin(omega*pi*t + phase)
  std::vector<double> phase;
  std::vector<double> offset;
  double noise_level = 0.5;

  std::size_t components() const { return amplitude.size(); }

  /// Noise-free value at t.
  double mean_at(double t) const;

  /// Noisy observation: mean_at(t) + noise_level * standard normal draw.
  double sample_at(double t, Rng& rng) const;
};

struct TrigGenConfig {
  std::size_t count = 10000;
  std::size_t n_components = 10;
  double eta = 0.5;
  double train_fraction = 0.8;
  // Component parameter ranges; exposed so generated files can record them.
  // The defaults mix a slow multi-scale trend band with a few fast "clutter"
  // sinusoids whose periods sit below the sampling resolution, so tracking
  // the trend requires smoothing over actual elapsed time.
  double amp_lo = 0.5, amp_hi = 2.0;
  double omega_lo = 0.02, omega_hi = 0.12;  // trend band
  bool omega_log_uniform = true;            // equal mass per octave
  std::size_t n_clutter = 3;                // of n_components, drawn from the fast band
  double clutter_lo = 0.7, clutter_hi = 1.0;
  double phase_lo = 0.0, phase_hi = 6.283185307179586;
  double offset_lo = -0.5, offset_hi = 0.5;
};

struct BenchmarkSeries {
  TrigSeriesSpec spec;
  bool train = true;  // 80/20 split fixed at generation
};

std::vector<BenchmarkSeries> gen_trig_series(Rng& rng, const TrigGenConfig& config);

/// One regression example: 10 observed points at irregular times plus the 3
/// targets one, two and three time units past the last observation.
struct SampledInstance {
  AsyncSeries inputs;
  std::vector<double> target_times;
  std::vector<double> target_values;
};

/// Start time ~ U(0,10); 9 intervals ~ U(1e-3, max_interval); targets are
/// noisy evaluations at t_last + 1, +2, +3.
SampledInstance sample_instance(const TrigSeriesSpec& spec, Rng& rng, double max_interval);

void save_benchmark(const std::vector<BenchmarkSeries>& series,
                    const std::filesystem::path& path);
std::vector<BenchmarkSeries> load_benchmark(const std::filesystem::path& path);

}  // namespace simta
