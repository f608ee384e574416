#include "simta/series.hpp"

#include <algorithm>
#include <string>

#include "simta/error.hpp"

namespace simta {

void AsyncSeries::validate() const {
  if (timestamps.empty()) throw DataError("AsyncSeries: empty series");
  if (values.rows() != timestamps.size())
    throw DataError("AsyncSeries: " + std::to_string(values.rows()) +
                    " value rows for " + std::to_string(timestamps.size()) +
                    " timestamps");
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] > timestamps[i - 1]))
      throw DataError("AsyncSeries: timestamps not strictly increasing at index " +
                      std::to_string(i));
  }
}

std::vector<double> AsyncSeries::intervals() const {
  std::vector<double> tau;
  if (timestamps.size() < 2) return tau;
  tau.reserve(timestamps.size() - 1);
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    tau.push_back(timestamps[i] - timestamps[i - 1]);
  return tau;
}

AsyncSeries AsyncSeries::truncated(double cutoff) const {
  auto it = std::upper_bound(timestamps.begin(), timestamps.end(), cutoff);
  std::size_t keep = static_cast<std::size_t>(it - timestamps.begin());
  AsyncSeries out;
  out.timestamps.assign(timestamps.begin(), timestamps.begin() + keep);
  out.values = Matrix(keep, values.cols());
  for (std::size_t i = 0; i < keep; ++i)
    std::copy(values.row_ptr(i), values.row_ptr(i) + values.cols(), out.values.row_ptr(i));
  return out;
}

}  // namespace simta
