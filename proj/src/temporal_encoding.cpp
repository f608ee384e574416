#include "simta/temporal_encoding.hpp"

#include <cmath>

#include "simta/error.hpp"

namespace simta {

std::vector<double> temporal_encode(double delta_t, const TemporalEncoding& enc) {
  if (delta_t < 0.0) throw DataError("temporal_encode: negative time offset");
  if (enc.dim % 2 != 0) throw DataError("temporal_encode: dim must be even");
  std::vector<double> out(enc.dim);
  for (std::size_t k = 0; 2 * k < enc.dim; ++k) {
    const double exponent = static_cast<double>(2 * k) / static_cast<double>(enc.dim);
    const double angle = delta_t / std::pow(enc.base, exponent);
    out[2 * k] = std::sin(angle);
    out[2 * k + 1] = std::cos(angle);
  }
  return out;
}

}  // namespace simta
