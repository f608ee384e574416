#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simta/activations.hpp"
#include "simta/matrix.hpp"
#include "simta/params.hpp"
#include "simta/rng.hpp"
#include "simta/series.hpp"

namespace simta {

/// Trainable state of one temporal-attention module. lambda is kept positive
/// through a softplus reparameterization of lambda_raw; beta is free.
struct SimTAModuleParams {
  double lambda_raw = 0.0;  // lambda = softplus(lambda_raw), so > 0 always
  double beta = 0.0;
  Matrix W;  // C_in x C_out
  Matrix b;  // 1 x C_out

  double lambda() const { return softplus(lambda_raw); }
  std::size_t in_dim() const { return W.rows(); }
  std::size_t out_dim() const { return W.cols(); }
  std::size_t param_count() const { return W.size() + b.size() + 2; }
};

/// Glorot-uniform weights, zero bias, lambda_raw = 0 (lambda ~ 0.693), beta 0.
SimTAModuleParams make_simta_module(std::size_t c_in, std::size_t c_out, Rng& rng);

struct AttentionMatrices {
  Matrix pre_softmax;  // T x T; row i attends to columns j <= i
  Matrix mask;         // 1 where attention is allowed, 0 for future positions
};

/// Pre-softmax attention scores from the interval vector: diagonal 0, entry
/// (i, j) for j < i equals -lambda * sum(tau[j..i-1]) + beta, and j > i is
/// masked. Cumulative interval sums are computed once, so the whole matrix
/// costs O(T^2). Non-positive intervals and non-positive lambda are rejected.
AttentionMatrices build_attention(std::span<const double> tau, double lambda, double beta);

struct SimTAModuleCache {
  Matrix x;           // input, T x C_in
  Matrix z;           // x W + b
  Matrix activated;   // sigma(z)
  Matrix attention;   // row-stochastic attention, T x T
  Matrix mask;
  std::vector<double> cum;  // cum[i] = elapsed time from step 0 to step i
};

struct SimTAModuleGrads {
  Matrix x;  // gradient w.r.t. the module input
  Matrix W;
  Matrix b;
  double lambda_raw = 0.0;
  double beta = 0.0;
};

/// softmax(A(tau)) * sigma(x W + b). cache may be null when no backward pass
/// will follow.
Matrix simta_forward(const Matrix& x, std::span<const double> tau,
                     const SimTAModuleParams& params, Activation act,
                     SimTAModuleCache* cache);

/// Reverse-mode gradients through the attention product, the row-softmax
/// Jacobian into lambda/beta (via the softplus reparameterization), and the
/// linear map.
SimTAModuleGrads simta_backward(const SimTAModuleParams& params, Activation act,
                                const SimTAModuleCache& cache, const Matrix& upstream);

/// One or more stacked modules sharing the same interval vector.
struct SimTAStack {
  std::vector<SimTAModuleParams> modules;
  Activation activation = Activation::Tanh;

  std::size_t in_dim() const { return modules.front().in_dim(); }
  std::size_t out_dim() const { return modules.back().out_dim(); }
  std::size_t param_count() const;
};

/// dims = {c_in, h1, ..., c_out}; one module per consecutive pair.
SimTAStack make_simta_stack(const std::vector<std::size_t>& dims, Activation act, Rng& rng);

struct SimTAStackCache {
  std::vector<SimTAModuleCache> modules;
  std::vector<double> tau;
  std::size_t steps = 0;
};

struct SimTAStackGrads {
  std::vector<SimTAModuleGrads> modules;
  Matrix input;  // gradient w.r.t. the series values
};

/// Applies the modules in order and returns the summary vector: the final
/// time step's row of the last module's output (1 x C_out), the only row
/// that attends over the entire series.
Matrix stack_forward(const AsyncSeries& series, const SimTAStack& stack,
                     SimTAStackCache* cache);

SimTAStackGrads stack_backward(const SimTAStack& stack, const SimTAStackCache& cache,
                               const Matrix& d_summary);

std::vector<ParamRef> param_refs(SimTAStack& stack, const std::string& prefix);
std::vector<ParamRef> grad_refs(SimTAStackGrads& grads, const std::string& prefix);

}  // namespace simta
