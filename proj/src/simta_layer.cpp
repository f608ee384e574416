#include "simta/simta_layer.hpp"

#include <cmath>
#include <string>

#include "simta/error.hpp"

namespace simta {

SimTAModuleParams make_simta_module(std::size_t c_in, std::size_t c_out, Rng& rng) {
  SimTAModuleParams p;
  p.W = Matrix(c_in, c_out);
  p.b = Matrix(1, c_out);
  const double limit = std::sqrt(6.0 / static_cast<double>(c_in + c_out));
  for (double& w : p.W) w = rng.uniform(-limit, limit);
  return p;
}

AttentionMatrices build_attention(std::span<const double> tau, double lambda, double beta) {
  if (lambda <= 0.0) throw NumericError("build_attention: lambda must be positive");
  const std::size_t t_len = tau.size() + 1;
  std::vector<double> cum(t_len, 0.0);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0))
      throw DataError("build_attention: non-positive interval at index " +
                      std::to_string(i));
    cum[i + 1] = cum[i] + tau[i];
  }
  AttentionMatrices out;
  out.pre_softmax = Matrix(t_len, t_len);
  out.mask = Matrix(t_len, t_len);
  for (std::size_t i = 0; i < t_len; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      out.pre_softmax(i, j) = -lambda * (cum[i] - cum[j]) + beta;
      out.mask(i, j) = 1.0;
    }
    out.mask(i, i) = 1.0;  // diagonal score stays 0
  }
  return out;
}

Matrix simta_forward(const Matrix& x, std::span<const double> tau,
                     const SimTAModuleParams& params, Activation act,
                     SimTAModuleCache* cache) {
  if (x.cols() != params.in_dim())
    throw DimensionError("simta_forward: input " + x.shape_str() + " vs weights " +
                         params.W.shape_str());
  if (x.rows() != tau.size() + 1)
    throw DimensionError("simta_forward: " + std::to_string(x.rows()) +
                         " rows and " + std::to_string(tau.size()) + " intervals");
  AttentionMatrices attn = build_attention(tau, params.lambda(), params.beta);
  Matrix probs = softmax_rows(attn.pre_softmax, attn.mask);
  Matrix z = add_row_broadcast(matmul(x, params.W), params.b);
  Matrix activated = apply_activation(act, z);
  Matrix out = matmul(probs, activated);
  if (cache) {
    cache->x = x;
    cache->z = std::move(z);
    cache->activated = std::move(activated);
    cache->attention = std::move(probs);
    cache->mask = std::move(attn.mask);
    cache->cum.assign(tau.size() + 1, 0.0);
    for (std::size_t i = 0; i < tau.size(); ++i) cache->cum[i + 1] = cache->cum[i] + tau[i];
  }
  return out;
}

SimTAModuleGrads simta_backward(const SimTAModuleParams& params, Activation act,
                                const SimTAModuleCache& cache, const Matrix& upstream) {
  require_same_shape(upstream, Matrix(cache.x.rows(), params.out_dim()),
                     "simta_backward upstream");
  const std::size_t t_len = cache.x.rows();

  // Y = P F with F = sigma(z): split the product rule.
  Matrix d_probs = matmul(upstream, transpose(cache.activated));  // T x T
  Matrix d_activated = matmul(transpose(cache.attention), upstream);

  Matrix d_z = hadamard(d_activated, apply_activation_deriv(act, cache.z));
  SimTAModuleGrads grads;
  grads.W = matmul(transpose(cache.x), d_z);
  grads.b = col_sums(d_z);
  grads.x = matmul(d_z, transpose(params.W));

  // Row-softmax Jacobian: dA(i,j) = P(i,j) (dP(i,j) - sum_k P(i,k) dP(i,k)),
  // over unmasked columns. Diagonal entries of A are constants, so only
  // j < i feed lambda and beta.
  double d_lambda = 0.0;
  double d_beta = 0.0;
  for (std::size_t i = 0; i < t_len; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j <= i; ++j)
      dot += cache.attention(i, j) * d_probs(i, j);
    for (std::size_t j = 0; j < i; ++j) {
      const double d_pre = cache.attention(i, j) * (d_probs(i, j) - dot);
      d_lambda += d_pre * -(cache.cum[i] - cache.cum[j]);
      d_beta += d_pre;
    }
  }
  grads.lambda_raw = d_lambda * sigmoid_scalar(params.lambda_raw);  // softplus'
  grads.beta = d_beta;
  return grads;
}

std::size_t SimTAStack::param_count() const {
  std::size_t n = 0;
  for (const auto& m : modules) n += m.param_count();
  return n;
}

SimTAStack make_simta_stack(const std::vector<std::size_t>& dims, Activation act,
                            Rng& rng) {
  if (dims.size() < 2) throw DataError("make_simta_stack: need at least two dims");
  SimTAStack stack;
  stack.activation = act;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i)
    stack.modules.push_back(make_simta_module(dims[i], dims[i + 1], rng));
  return stack;
}

Matrix stack_forward(const AsyncSeries& series, const SimTAStack& stack,
                     SimTAStackCache* cache) {
  series.validate();
  std::vector<double> tau = series.intervals();
  if (cache) {
    cache->modules.assign(stack.modules.size(), SimTAModuleCache{});
    cache->tau = tau;
    cache->steps = series.steps();
  }
  Matrix current = series.values;
  for (std::size_t i = 0; i < stack.modules.size(); ++i) {
    current = simta_forward(current, tau, stack.modules[i], stack.activation,
                            cache ? &cache->modules[i] : nullptr);
  }
  return row(current, current.rows() - 1);
}

SimTAStackGrads stack_backward(const SimTAStack& stack, const SimTAStackCache& cache,
                               const Matrix& d_summary) {
  if (cache.modules.size() != stack.modules.size())
    throw DimensionError("stack_backward: cache does not match stack");
  SimTAStackGrads grads;
  grads.modules.resize(stack.modules.size());

  // Only the summary row carries upstream gradient.
  Matrix upstream(cache.steps, stack.out_dim());
  for (std::size_t j = 0; j < d_summary.cols(); ++j)
    upstream(cache.steps - 1, j) = d_summary(0, j);

  for (std::size_t i = stack.modules.size(); i-- > 0;) {
    grads.modules[i] =
        simta_backward(stack.modules[i], stack.activation, cache.modules[i], upstream);
    upstream = grads.modules[i].x;
  }
  grads.input = upstream;
  return grads;
}

std::vector<ParamRef> param_refs(SimTAStack& stack, const std::string& prefix) {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < stack.modules.size(); ++i) {
    auto& m = stack.modules[i];
    const std::string base = prefix + ".m" + std::to_string(i);
    refs.push_back(param_ref(base + ".W", m.W));
    refs.push_back(param_ref(base + ".b", m.b));
    refs.push_back(param_ref(base + ".lambda_raw", m.lambda_raw));
    refs.push_back(param_ref(base + ".beta", m.beta));
  }
  return refs;
}

std::vector<ParamRef> grad_refs(SimTAStackGrads& grads, const std::string& prefix) {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < grads.modules.size(); ++i) {
    auto& m = grads.modules[i];
    const std::string base = prefix + ".m" + std::to_string(i);
    refs.push_back(param_ref(base + ".W", m.W));
    refs.push_back(param_ref(base + ".b", m.b));
    refs.push_back(param_ref(base + ".lambda_raw", m.lambda_raw));
    refs.push_back(param_ref(base + ".beta", m.beta));
  }
  return refs;
}

}  // namespace simta
