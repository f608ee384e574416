#include "simta/lstm.hpp"

#include <cmath>
#include <cstdlib>

#include "simta/activations.hpp"
#include "simta/error.hpp"

namespace simta {

LstmVariant lstm_variant_from_name(const std::string& name) {
  if (name == "lstm") return LstmVariant::Plain;
  if (name == "lstm_i") return LstmVariant::Interval;
  if (name == "lstm_s") return LstmVariant::Stamp;
  throw DataError("unknown lstm variant: " + name);
}

std::string lstm_variant_name(LstmVariant v) {
  switch (v) {
    case LstmVariant::Plain: return "lstm";
    case LstmVariant::Interval: return "lstm_i";
    case LstmVariant::Stamp: return "lstm_s";
  }
  return "?";
}

std::size_t lstm_input_dim(std::size_t channels, LstmVariant v) {
  return v == LstmVariant::Plain ? channels : channels + 1;
}

std::size_t LstmParams::param_count() const {
  return 4 * (w_xi.size() + w_hi.size() + b_i.size());
}

LstmParams make_lstm(std::size_t input_dim, std::size_t hidden, Rng& rng) {
  LstmParams p;
  auto init = [&](std::size_t r, std::size_t c) {
    Matrix m(r, c);
    const double limit = std::sqrt(6.0 / static_cast<double>(r + c));
    for (double& w : m) w = rng.uniform(-limit, limit);
    return m;
  };
  p.w_xi = init(input_dim, hidden);
  p.w_hi = init(hidden, hidden);
  p.b_i = Matrix(1, hidden);
  p.w_xf = init(input_dim, hidden);
  p.w_hf = init(hidden, hidden);
  p.b_f = Matrix(1, hidden, 1.0);  // open forget gate at start of training
  p.w_xg = init(input_dim, hidden);
  p.w_hg = init(hidden, hidden);
  p.b_g = Matrix(1, hidden);
  p.w_xo = init(input_dim, hidden);
  p.w_ho = init(hidden, hidden);
  p.b_o = Matrix(1, hidden);
  return p;
}

Matrix lstm_input_matrix(const AsyncSeries& series, LstmVariant v, bool normalize_stamps) {
  series.validate();
  const std::size_t t_len = series.steps();
  const std::size_t c = series.channels();
  if (v == LstmVariant::Plain) return series.values;

  Matrix out(t_len, c + 1);
  for (std::size_t i = 0; i < t_len; ++i) {
    for (std::size_t j = 0; j < c; ++j) out(i, j) = series.values(i, j);
    if (v == LstmVariant::Interval) {
      out(i, c) = i == 0 ? 0.0 : series.timestamps[i] - series.timestamps[i - 1];
    } else {
      out(i, c) = series.timestamps[i];
    }
  }
  if (v == LstmVariant::Stamp && normalize_stamps) {
    double mean = 0.0;
    for (std::size_t i = 0; i < t_len; ++i) mean += out(i, c);
    mean /= static_cast<double>(t_len);
    double var = 0.0;
    for (std::size_t i = 0; i < t_len; ++i) {
      const double d = out(i, c) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(t_len));
    for (std::size_t i = 0; i < t_len; ++i)
      out(i, c) = sd > 0.0 ? (out(i, c) - mean) / sd : 0.0;
  }
  return out;
}

Matrix lstm_forward(const Matrix& inputs, const LstmParams& params, LstmCache* cache) {
  if (inputs.cols() != params.input_dim())
    throw DimensionError("lstm_forward: input " + inputs.shape_str() + " vs weights " +
                         params.w_xi.shape_str());
  const std::size_t t_len = inputs.rows();
  const std::size_t h_dim = params.hidden();
  if (cache) {
    cache->inputs = inputs;
    cache->gate_i = Matrix(t_len, h_dim);
    cache->gate_f = Matrix(t_len, h_dim);
    cache->gate_g = Matrix(t_len, h_dim);
    cache->gate_o = Matrix(t_len, h_dim);
    cache->cell = Matrix(t_len, h_dim);
    cache->tanh_cell = Matrix(t_len, h_dim);
    cache->hidden_prev = Matrix(t_len, h_dim);
  }
  Matrix h(1, h_dim);
  Matrix c(1, h_dim);
  for (std::size_t t = 0; t < t_len; ++t) {
    Matrix x = row(inputs, t);
    Matrix zi = add_row_broadcast(matmul(x, params.w_xi) + matmul(h, params.w_hi), params.b_i);
    Matrix zf = add_row_broadcast(matmul(x, params.w_xf) + matmul(h, params.w_hf), params.b_f);
    Matrix zg = add_row_broadcast(matmul(x, params.w_xg) + matmul(h, params.w_hg), params.b_g);
    Matrix zo = add_row_broadcast(matmul(x, params.w_xo) + matmul(h, params.w_ho), params.b_o);
    Matrix gi = sigmoid(zi), gf = sigmoid(zf), gg = tanh_act(zg), go = sigmoid(zo);
    Matrix c_new = hadamard(gf, c) + hadamard(gi, gg);
    Matrix tanh_c = tanh_act(c_new);
    Matrix h_new = hadamard(go, tanh_c);
    if (cache) {
      for (std::size_t j = 0; j < h_dim; ++j) {
        cache->gate_i(t, j) = gi(0, j);
        cache->gate_f(t, j) = gf(0, j);
        cache->gate_g(t, j) = gg(0, j);
        cache->gate_o(t, j) = go(0, j);
        cache->cell(t, j) = c_new(0, j);
        cache->tanh_cell(t, j) = tanh_c(0, j);
        cache->hidden_prev(t, j) = h(0, j);
      }
    }
    h = std::move(h_new);
    c = std::move(c_new);
  }
  return h;
}

Matrix lstm_forward(const AsyncSeries& series, const LstmParams& params, LstmVariant v,
                    LstmCache* cache, bool normalize_stamps) {
  return lstm_forward(lstm_input_matrix(series, v, normalize_stamps), params, cache);
}

LstmGrads lstm_backward(const LstmParams& params, const LstmCache& cache,
                        const Matrix& d_hidden_final) {
  const std::size_t t_len = cache.inputs.rows();
  const std::size_t h_dim = params.hidden();
  auto zeros_like = [](const Matrix& m) { return Matrix(m.rows(), m.cols()); };
  LstmGrads g;
  g.w_xi = zeros_like(params.w_xi); g.w_hi = zeros_like(params.w_hi); g.b_i = zeros_like(params.b_i);
  g.w_xf = zeros_like(params.w_xf); g.w_hf = zeros_like(params.w_hf); g.b_f = zeros_like(params.b_f);
  g.w_xg = zeros_like(params.w_xg); g.w_hg = zeros_like(params.w_hg); g.b_g = zeros_like(params.b_g);
  g.w_xo = zeros_like(params.w_xo); g.w_ho = zeros_like(params.w_ho); g.b_o = zeros_like(params.b_o);
  g.inputs = Matrix(t_len, cache.inputs.cols());

  Matrix dh = d_hidden_final;
  Matrix dc(1, h_dim);
  for (std::size_t t = t_len; t-- > 0;) {
    Matrix gi = row(cache.gate_i, t), gf = row(cache.gate_f, t);
    Matrix gg = row(cache.gate_g, t), go = row(cache.gate_o, t);
    Matrix tanh_c = row(cache.tanh_cell, t);
    Matrix h_prev = row(cache.hidden_prev, t);
    Matrix x = row(cache.inputs, t);

    // dc accumulates the path through h_t = o * tanh(c_t).
    for (std::size_t j = 0; j < h_dim; ++j)
      dc(0, j) += dh(0, j) * go(0, j) * (1.0 - tanh_c(0, j) * tanh_c(0, j));

    Matrix dzo(1, h_dim), dzf(1, h_dim), dzi(1, h_dim), dzg(1, h_dim);
    const bool first = t == 0;
    for (std::size_t j = 0; j < h_dim; ++j) {
      dzo(0, j) = dh(0, j) * tanh_c(0, j) * go(0, j) * (1.0 - go(0, j));
      const double c_prev = first ? 0.0 : cache.cell(t - 1, j);
      dzf(0, j) = dc(0, j) * c_prev * gf(0, j) * (1.0 - gf(0, j));
      dzi(0, j) = dc(0, j) * gg(0, j) * gi(0, j) * (1.0 - gi(0, j));
      dzg(0, j) = dc(0, j) * gi(0, j) * (1.0 - gg(0, j) * gg(0, j));
    }

    Matrix xt = transpose(x);
    Matrix ht = transpose(h_prev);
    g.w_xi += matmul(xt, dzi); g.w_hi += matmul(ht, dzi); g.b_i += dzi;
    g.w_xf += matmul(xt, dzf); g.w_hf += matmul(ht, dzf); g.b_f += dzf;
    g.w_xg += matmul(xt, dzg); g.w_hg += matmul(ht, dzg); g.b_g += dzg;
    g.w_xo += matmul(xt, dzo); g.w_ho += matmul(ht, dzo); g.b_o += dzo;

    Matrix dx = matmul(dzi, transpose(params.w_xi)) + matmul(dzf, transpose(params.w_xf)) +
                matmul(dzg, transpose(params.w_xg)) + matmul(dzo, transpose(params.w_xo));
    for (std::size_t j = 0; j < dx.cols(); ++j) g.inputs(t, j) = dx(0, j);

    Matrix dh_prev = matmul(dzi, transpose(params.w_hi)) + matmul(dzf, transpose(params.w_hf)) +
                     matmul(dzg, transpose(params.w_hg)) + matmul(dzo, transpose(params.w_ho));
    for (std::size_t j = 0; j < h_dim; ++j) dc(0, j) *= gf(0, j);
    dh = std::move(dh_prev);
  }
  return g;
}

std::vector<ParamRef> param_refs(LstmParams& p, const std::string& prefix) {
  return {
      param_ref(prefix + ".w_xi", p.w_xi), param_ref(prefix + ".w_hi", p.w_hi),
      param_ref(prefix + ".b_i", p.b_i),   param_ref(prefix + ".w_xf", p.w_xf),
      param_ref(prefix + ".w_hf", p.w_hf), param_ref(prefix + ".b_f", p.b_f),
      param_ref(prefix + ".w_xg", p.w_xg), param_ref(prefix + ".w_hg", p.w_hg),
      param_ref(prefix + ".b_g", p.b_g),   param_ref(prefix + ".w_xo", p.w_xo),
      param_ref(prefix + ".w_ho", p.w_ho), param_ref(prefix + ".b_o", p.b_o),
  };
}

std::vector<ParamRef> grad_refs(LstmGrads& g, const std::string& prefix) {
  return {
      param_ref(prefix + ".w_xi", g.w_xi), param_ref(prefix + ".w_hi", g.w_hi),
      param_ref(prefix + ".b_i", g.b_i),   param_ref(prefix + ".w_xf", g.w_xf),
      param_ref(prefix + ".w_hf", g.w_hf), param_ref(prefix + ".b_f", g.b_f),
      param_ref(prefix + ".w_xg", g.w_xg), param_ref(prefix + ".w_hg", g.w_hg),
      param_ref(prefix + ".b_g", g.b_g),   param_ref(prefix + ".w_xo", g.w_xo),
      param_ref(prefix + ".w_ho", g.w_ho), param_ref(prefix + ".b_o", g.b_o),
  };
}

std::size_t lstm_param_count(std::size_t input_dim, std::size_t hidden) {
  return 4 * (input_dim * hidden + hidden * hidden + hidden);
}

std::size_t lstm_hidden_for_parity(std::size_t input_dim, std::size_t target_params,
                                   std::size_t extra_params_per_hidden,
                                   std::size_t extra_params_const) {
  std::size_t best_h = 1;
  long long best_gap = -1;
  for (std::size_t h = 1; h <= 512; ++h) {
    const long long total =
        static_cast<long long>(lstm_param_count(input_dim, h) +
                               extra_params_per_hidden * h + extra_params_const);
    const long long gap = std::llabs(total - static_cast<long long>(target_params));
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best_h = h;
    }
  }
  return best_h;
}

}  // namespace simta
