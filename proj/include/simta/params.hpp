#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "simta/matrix.hpp"

namespace simta {

/// Named view into one trainable parameter group (a weight matrix, a bias
/// row, or a single scalar). Models hand out an ordered list of these; the
/// optimizer and the gradient checker work on the flattened sequence.
struct ParamRef {
  std::string name;
  double* values = nullptr;
  std::size_t size = 0;
};

inline ParamRef param_ref(std::string name, Matrix& m) {
  return {std::move(name), m.data(), m.size()};
}
inline ParamRef param_ref(std::string name, double& scalar) {
  return {std::move(name), &scalar, 1};
}

std::size_t total_size(const std::vector<ParamRef>& refs);
std::vector<double> flatten(const std::vector<ParamRef>& refs);
void assign(const std::vector<ParamRef>& refs, std::span<const double> flat);

}  // namespace simta
