#pragma once

#include <vector>

#include "simta/matrix.hpp"

namespace simta {

/// One modality's observations at strictly increasing timestamps.
/// values is T x C; the interval vector tau (length T-1, all positive) is
/// what the attention layer consumes.
struct AsyncSeries {
  Matrix values;
  std::vector<double> timestamps;

  std::size_t steps() const { return timestamps.size(); }
  std::size_t channels() const { return values.cols(); }

  /// Throws DataError when empty, lengths disagree, or timestamps are not
  /// strictly increasing.
  void validate() const;

  /// tau[i] = timestamps[i+1] - timestamps[i].
  std::vector<double> intervals() const;

  /// Observations with t <= cutoff (prefix; timestamps are increasing).
  AsyncSeries truncated(double cutoff) const;
};

}  // namespace simta
