#include "simta/params.hpp"

#include <algorithm>

#include "simta/error.hpp"

namespace simta {

std::size_t total_size(const std::vector<ParamRef>& refs) {
  std::size_t n = 0;
  for (const auto& r : refs) n += r.size;
  return n;
}

std::vector<double> flatten(const std::vector<ParamRef>& refs) {
  std::vector<double> out;
  out.reserve(total_size(refs));
  for (const auto& r : refs) out.insert(out.end(), r.values, r.values + r.size);
  return out;
}

void assign(const std::vector<ParamRef>& refs, std::span<const double> flat) {
  if (flat.size() != total_size(refs))
    throw DimensionError("assign: flat vector length does not match parameter refs");
  std::size_t off = 0;
  for (const auto& r : refs) {
    std::copy(flat.begin() + off, flat.begin() + off + r.size, r.values);
    off += r.size;
  }
}

}  // namespace simta
