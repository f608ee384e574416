#pragma once

#include <cstddef>
#include <vector>

namespace simta {

/// Sinusoidal encoding of the gap between the last observation and the
/// prediction time; added elementwise to a modality's summary vector, so its
/// dim must equal the summary dim.
struct TemporalEncoding {
  std::size_t dim = 0;  // even
  double base = 10000.0;
};

/// entry 2k   = sin(delta_t / base^(2k/dim))
/// entry 2k+1 = cos(delta_t / base^(2k/dim))
/// delta_t must be >= 0.
std::vector<double> temporal_encode(double delta_t, const TemporalEncoding& enc);

}  // namespace simta
