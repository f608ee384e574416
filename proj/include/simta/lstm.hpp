#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simta/matrix.hpp"
#include "simta/params.hpp"
#include "simta/rng.hpp"
#include "simta/series.hpp"

namespace simta {

/// Input augmentation of the three recurrent baselines: value only, value
/// plus preceding interval (first step padded with 0), value plus raw
/// timestamp.
enum class LstmVariant { Plain, Interval, Stamp };

LstmVariant lstm_variant_from_name(const std::string& name);
std::string lstm_variant_name(LstmVariant v);

/// Input width after augmentation.
std::size_t lstm_input_dim(std::size_t channels, LstmVariant v);

/// Single-layer gated recurrence. Forget-gate bias starts at 1.
struct LstmParams {
  Matrix w_xi, w_hi, b_i;
  Matrix w_xf, w_hf, b_f;
  Matrix w_xg, w_hg, b_g;
  Matrix w_xo, w_ho, b_o;

  std::size_t input_dim() const { return w_xi.rows(); }
  std::size_t hidden() const { return w_xi.cols(); }
  std::size_t param_count() const;
};

LstmParams make_lstm(std::size_t input_dim, std::size_t hidden, Rng& rng);

/// Builds the (possibly augmented) T x D input matrix for a variant.
/// normalize_stamps z-scores timestamps within the series (off by default).
Matrix lstm_input_matrix(const AsyncSeries& series, LstmVariant v,
                         bool normalize_stamps = false);

struct LstmCache {
  Matrix inputs;                  // T x D
  Matrix gate_i, gate_f, gate_g, gate_o;  // post-activation, T x H
  Matrix cell, tanh_cell;         // T x H
  Matrix hidden_prev;             // h_{t-1} per step, T x H
};

struct LstmGrads {
  Matrix w_xi, w_hi, b_i;
  Matrix w_xf, w_hf, b_f;
  Matrix w_xg, w_hg, b_g;
  Matrix w_xo, w_ho, b_o;
  Matrix inputs;  // gradient w.r.t. the augmented input matrix
};

/// Runs the recurrence over the prepared input matrix and returns the final
/// hidden state h_T (1 x H).
Matrix lstm_forward(const Matrix& inputs, const LstmParams& params, LstmCache* cache);

/// Convenience overload: augments the series per variant first.
Matrix lstm_forward(const AsyncSeries& series, const LstmParams& params, LstmVariant v,
                    LstmCache* cache, bool normalize_stamps = false);

/// Backpropagation through time from d h_T.
LstmGrads lstm_backward(const LstmParams& params, const LstmCache& cache,
                        const Matrix& d_hidden_final);

std::vector<ParamRef> param_refs(LstmParams& p, const std::string& prefix);
std::vector<ParamRef> grad_refs(LstmGrads& g, const std::string& prefix);

std::size_t lstm_param_count(std::size_t input_dim, std::size_t hidden);

/// Smallest hidden size whose parameter count is closest to target_params;
/// used to build baselines of comparable size to a given attention model.
std::size_t lstm_hidden_for_parity(std::size_t input_dim, std::size_t target_params,
                                   std::size_t extra_params_per_hidden = 0,
                                   std::size_t extra_params_const = 0);

}  // namespace simta
