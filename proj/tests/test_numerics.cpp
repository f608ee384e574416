#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "simta/activations.hpp"
#include "simta/adam.hpp"
#include "simta/error.hpp"
#include "simta/grad_check.hpp"
#include "simta/losses.hpp"
#include "simta/matrix.hpp"
#include "simta/params.hpp"
#include "simta/rng.hpp"

using namespace simta;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Matrix m(r, c);
  for (double& v : m) v = rng.uniform(lo, hi);
  return m;
}

// Entry-wise triple loop, independent of the matmul implementation.
Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("matmul identity") {
  Matrix eye = Matrix::from_rows({{1, 0}, {0, 1}});
  Matrix m = Matrix::from_rows({{2, -3}, {5, 7}});
  CHECK(max_abs_diff(matmul(eye, m), m) == 0.0);
}

TEST_CASE("matmul hand arithmetic") {
  Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  Matrix b = Matrix::from_rows({{1}, {1}});
  Matrix p = matmul(a, b);
  CHECK(p(0, 0) == 3.0);
  CHECK(p(1, 0) == 7.0);
}

TEST_CASE("matmul matches triple-loop oracle") {
  Rng rng(11);
  Matrix a = random_matrix(5, 7, rng);
  Matrix b = random_matrix(7, 3, rng);
  CHECK(max_abs_diff(matmul(a, b), matmul_oracle(a, b)) < 1e-12);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Matrix a(2, 3), b(2, 2);
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), DimensionError);
}

TEST_CASE("matmul associativity on random conformable triples") {
  Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    std::size_t p = 1 + rng.below(6), q = 1 + rng.below(6);
    std::size_t r = 1 + rng.below(6), s = 1 + rng.below(6);
    Matrix a = random_matrix(p, q, rng), b = random_matrix(q, r, rng),
           c = random_matrix(r, s, rng);
    CHECK(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) < 1e-9);
  }
}

TEST_CASE("softmax_rows single unmasked entry wins") {
  Matrix a = Matrix::from_rows({{0, -100, 17}});
  Matrix mask = Matrix::from_rows({{1, 0, 0}});
  Matrix p = softmax_rows(a, mask);
  CHECK(p(0, 0) == 1.0);
  CHECK(p(0, 1) == 0.0);
  CHECK(p(0, 2) == 0.0);
}

TEST_CASE("softmax_rows two-entry row") {
  Matrix a = Matrix::from_rows({{-1, 0}});
  Matrix mask = Matrix::from_rows({{1, 1}});
  Matrix p = softmax_rows(a, mask);
  // Direct exp-normalization oracle.
  double e0 = std::exp(-1.0), e1 = std::exp(0.0);
  CHECK(p(0, 0) == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-5));
  CHECK(p(0, 1) == doctest::Approx(e1 / (e0 + e1)).epsilon(1e-5));
  CHECK(p(0, 0) == doctest::Approx(0.26894).epsilon(1e-4));
}

TEST_CASE("softmax_rows constant row is uniform") {
  Matrix a = Matrix::from_rows({{3.7, 3.7, 3.7}});
  Matrix mask = Matrix::from_rows({{1, 1, 1}});
  Matrix p = softmax_rows(a, mask);
  for (std::size_t j = 0; j < 3; ++j) CHECK(p(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("softmax_rows rejects fully masked row") {
  Matrix a(2, 2);
  Matrix mask = Matrix::from_rows({{1, 1}, {0, 0}});
  CHECK_THROWS_AS(softmax_rows(a, mask), NumericError);
}

TEST_CASE("softmax_rows: 1000 random masked rows sum to one") {
  Rng rng(99);
  for (int it = 0; it < 1000; ++it) {
    std::size_t n = 2 + rng.below(8);
    Matrix a = random_matrix(1, n, rng, -50.0, 50.0);
    Matrix mask(1, n);
    std::size_t keep = 1 + rng.below(n);
    for (std::size_t j = 0; j < keep; ++j) mask(0, j) = 1.0;
    // shuffle mask columns so the unmasked set is arbitrary
    for (std::size_t j = n; j > 1; --j) {
      std::size_t k = rng.below(j);
      std::swap(mask(0, j - 1), mask(0, k));
    }
    Matrix p = softmax_rows(a, mask);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += p(0, j);
      if (mask(0, j) == 0.0) CHECK(p(0, j) == 0.0);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("activation definitions") {
  Matrix x = Matrix::from_rows({{-2, 3, 0}});
  Matrix r = relu(x);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(0, 1) == 3.0);
  CHECK(sigmoid(Matrix(1, 1, 0.0))(0, 0) == 0.5);
  CHECK(tanh_act(Matrix(1, 1, 0.0))(0, 0) == 0.0);
}

TEST_CASE("tanh derivative matches central difference") {
  CHECK(tanh_deriv(Matrix(1, 1, 0.0))(0, 0) == 1.0);
  const double h = 1e-6;
  for (double x : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
    double numeric = (std::tanh(x + h) - std::tanh(x - h)) / (2 * h);
    CHECK(tanh_deriv(Matrix(1, 1, x))(0, 0) == doctest::Approx(numeric).epsilon(1e-8));
  }
}

TEST_CASE("mse loss on equal inputs is zero") {
  Matrix p = Matrix::from_rows({{1, 2}, {3, 4}});
  auto res = mse_loss(p, p);
  CHECK(res.value == 0.0);
  for (double g : res.grad) CHECK(g == 0.0);
}

TEST_CASE("mse loss hand arithmetic") {
  auto res = mse_loss(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{0, 0}}));
  CHECK(res.value == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("mse loss matches brute-force loop") {
  Rng rng(3);
  Matrix p = random_matrix(4, 6, rng), t = random_matrix(4, 6, rng);
  auto res = mse_loss(p, t);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = p.data()[i] - t.data()[i];
    acc += d * d;
  }
  CHECK(res.value == doctest::Approx(acc / p.size()).epsilon(1e-12));
  CHECK_THROWS_AS(mse_loss(Matrix(2, 2), Matrix(2, 3)), DimensionError);
}

TEST_CASE("mse gradient passes finite-difference check") {
  Rng rng(17);
  Matrix target = random_matrix(3, 2, rng);
  Matrix pred = random_matrix(3, 2, rng);
  auto res = mse_loss(pred, target);
  std::vector<double> params(pred.data(), pred.data() + pred.size());
  std::vector<double> grad(res.grad.data(), res.grad.data() + res.grad.size());
  auto loss = [&](std::span<const double> p) {
    Matrix m(3, 2);
    std::copy(p.begin(), p.end(), m.data());
    return mse_loss(m, target).value;
  };
  auto rep = grad_check(loss, params, grad, 1e-5, 1e-5);
  CHECK(rep.passed);
}

TEST_CASE("cross entropy uniform logits") {
  auto res = cross_entropy_loss(Matrix::from_rows({{0, 0}}), {1});
  CHECK(res.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("cross entropy saturated logits") {
  auto res = cross_entropy_loss(Matrix::from_rows({{-10, 10}}), {1});
  CHECK(res.value < 1e-4);
}

TEST_CASE("cross entropy batch equals per-sample loop") {
  Rng rng(8);
  Matrix logits = random_matrix(20, 2, rng, -3, 3);
  std::vector<int> labels(20);
  for (auto& y : labels) y = static_cast<int>(rng.below(2));
  auto res = cross_entropy_loss(logits, labels);
  double acc = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    double a = logits(i, 0), b = logits(i, 1);
    double z = std::exp(a) + std::exp(b);
    double p_true = std::exp(logits(i, labels[i])) / z;
    acc += -std::log(p_true);
  }
  CHECK(res.value == doctest::Approx(acc / 20).epsilon(1e-12));
}

TEST_CASE("cross entropy rejects non-binary labels") {
  CHECK_THROWS_AS(cross_entropy_loss(Matrix(1, 2), {2}), DataError);
}

TEST_CASE("cross entropy gradient passes finite-difference check") {
  Rng rng(21);
  Matrix logits = random_matrix(5, 2, rng, -2, 2);
  std::vector<int> labels{0, 1, 1, 0, 1};
  auto res = cross_entropy_loss(logits, labels);
  std::vector<double> params(logits.data(), logits.data() + logits.size());
  std::vector<double> grad(res.grad.data(), res.grad.data() + res.grad.size());
  auto loss = [&](std::span<const double> p) {
    Matrix m(5, 2);
    std::copy(p.begin(), p.end(), m.data());
    return cross_entropy_loss(m, labels).value;
  };
  CHECK(grad_check(loss, params, grad, 1e-5, 1e-5).passed);
}

TEST_CASE("adam zero gradient is identity for any step count") {
  std::vector<double> params{1.0, -2.0, 0.5};
  std::vector<double> zeros(3, 0.0);
  AdamState st(3);
  for (int i = 0; i < 25; ++i) adam_step(params, zeros, st);
  CHECK(st.step == 25);
  CHECK(params[0] == 1.0);
  CHECK(params[1] == -2.0);
  CHECK(params[2] == 0.5);
}

TEST_CASE("adam first step moves by ~lr in the gradient direction") {
  std::vector<double> params{1.0};
  std::vector<double> grads{2.0};
  AdamState st(1, 0.1);
  adam_step(params, grads, st);
  CHECK(st.step == 1);
  // Closed form: m_hat = g, v_hat = g^2, update = lr * g / (|g| + eps).
  CHECK(params[0] == doctest::Approx(0.9).epsilon(1e-8));
}

TEST_CASE("adam is deterministic") {
  auto run = [] {
    Rng rng(64);
    std::vector<double> params{0.3, -0.7, 1.1, 0.0};
    AdamState st(4, 1e-2);
    for (int step = 0; step < 10; ++step) {
      std::vector<double> grads(4);
      for (auto& g : grads) g = rng.uniform(-1, 1);
      adam_step(params, grads, st);
    }
    return params;
  };
  auto a = run(), b = run();
  for (int i = 0; i < 4; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("adam rejects non-finite gradients with the index") {
  std::vector<double> params{1.0, 2.0};
  std::vector<double> grads{0.0, std::nan("")};
  AdamState st(2);
  CHECK_THROWS_WITH_AS(adam_step(params, grads, st), doctest::Contains("index 1"),
                       NumericError);
}

TEST_CASE("grad_check accepts the analytic gradient of a linear layer") {
  // loss(W) = sum over rows of (W x - y)^2 for fixed x, y
  Rng rng(31);
  Matrix x = random_matrix(4, 1, rng);
  Matrix y = random_matrix(3, 1, rng);
  Matrix w = random_matrix(3, 4, rng);
  auto loss = [&](std::span<const double> p) {
    Matrix wm(3, 4);
    std::copy(p.begin(), p.end(), wm.data());
    Matrix r = matmul(wm, x) - y;
    double acc = 0.0;
    for (double v : r) acc += v * v;
    return acc;
  };
  // analytic: dL/dW = 2 (W x - y) x^T
  Matrix resid = matmul(w, x) - y;
  Matrix grad = matmul(resid, transpose(x)) * 2.0;
  std::vector<double> params(w.data(), w.data() + w.size());
  std::vector<double> g(grad.data(), grad.data() + grad.size());
  auto rep = grad_check(loss, params, g, 1e-5, 1e-7);
  CHECK(rep.passed);
  CHECK(rep.max_rel_err < 1e-7);
}

TEST_CASE("grad_check on a constant function sees zero gradients") {
  std::vector<double> params{1.0, 2.0};
  std::vector<double> zeros{0.0, 0.0};
  auto loss = [](std::span<const double>) { return 3.14; };
  auto rep = grad_check(loss, params, zeros, 1e-5, 1e-5);
  CHECK(rep.passed);
  CHECK(rep.max_rel_err == 0.0);
}

TEST_CASE("grad_check flags a corrupted gradient") {
  Matrix x = Matrix::from_rows({{0.5}, {-1.0}});
  auto loss = [&](std::span<const double> p) { return p[0] * 0.5 + p[1] * -1.0; };
  std::vector<double> params{0.2, 0.4};
  std::vector<double> corrupted{0.5 * 2.0, -1.0};  // first entry doubled
  CHECK_FALSE(grad_check(loss, params, corrupted, 1e-5, 1e-5).passed);
}

TEST_CASE("rng stream matches the stored 100-draw fixture") {
  static const std::uint64_t kFixture[100] = {
      13679457532755275413ull, 2949826092126892291ull, 5139283748462763858ull, 6349198060258255764ull,
      701532786141963250ull, 16015981125662989062ull, 4028864712777624925ull, 14769051326987775908ull,
      6270620877612482005ull, 11408980392250668974ull, 3779771651426294207ull, 9094045341461139646ull,
      9470486766231111398ull, 9592552252706221495ull, 12270025419241524956ull, 3752715396868486130ull,
      1910607418205583989ull, 9140336935745592861ull, 1723436047706647047ull, 12708817412199463008ull,
      17659533654446416872ull, 1347604182271487641ull, 11064657849904403925ull, 11433643108797302929ull,
      1368025501988796752ull, 5120214421805786385ull, 13687102363387602997ull, 14489907499361736991ull,
      17375492307696512263ull, 12805316055209107011ull, 14571235658746288501ull, 15504792434803289182ull,
      11936788950001448093ull, 14428236891479048158ull, 11760337337117360725ull, 7010184598893129283ull,
      1162605938390881553ull, 4907808435827497793ull, 14041756038980263744ull, 1696491107425968004ull,
      9781462316499347746ull, 2934045218811111737ull, 5037149692101864844ull, 14292225969113837329ull,
      12327860237607698483ull, 5928622861933973450ull, 1558413724744508586ull, 2628696075038781655ull,
      9313229157534096238ull, 17881743139202436335ull, 6791476662184033089ull, 3477164335915683848ull,
      2846749615188618532ull, 5905759445212106587ull, 481048453734857269ull, 15172489637160342603ull,
      12612343133707074049ull, 10255744022901024954ull, 16143476859658155952ull, 595097157334617274ull,
      4780430056316407830ull, 17797468212087351942ull, 11243509250546111302ull, 828042018597943978ull,
      5994384473773330622ull, 11495367897951795123ull, 18202012130042080084ull, 5691474112867620374ull,
      16446001858036164797ull, 17052030685304126822ull, 16545526174281114826ull, 12412851954075396187ull,
      3023084625803174130ull, 15406631913870834284ull, 14718612560568135170ull, 15067394384252110749ull,
      1825761526605736495ull, 14947606774453270094ull, 5859597753540043324ull, 9157175173231285275ull,
      260778234563238397ull, 13471455298635109341ull, 4571229358325483140ull, 6449932080265436355ull,
      13688150188951426643ull, 3765589239639410682ull, 14822845460416771674ull, 13393339775972723444ull,
      15681570820993544450ull, 13220172306979601754ull, 13968517620912084759ull, 8415204256005337031ull,
      3141584702306767475ull, 9323149455059780816ull, 12806064557732039966ull, 954207280056743029ull,
      12397545371612205943ull, 3919597154479846156ull, 13180849157127946955ull, 4179037728240083352ull,
  };
  Rng rng(42);
  for (int i = 0; i < 100; ++i) CHECK(rng.next_u64() == kFixture[i]);
}

TEST_CASE("rng uniform and normal prefixes are frozen") {
  Rng u(42);
  CHECK(u.uniform() == 0.74156487877182331);
  CHECK(u.uniform() == 0.1599103928769201);
  CHECK(u.uniform() == 0.27860113025513866);
  Rng n(7);
  CHECK(n.normal() == 0.98847433231873527);
  CHECK(n.normal() == 0.10465664748899398);
  CHECK(n.normal() == -1.8642558067312274);
}

TEST_CASE("rng uniform stays in [0,1) and derive forks an independent stream") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng parent(9);
  Rng child_a = parent.derive(0);
  Rng child_b = parent.derive(1);
  CHECK(child_a.next_u64() != child_b.next_u64());
  // derive is a pure function of (seed, stream)
  Rng again = Rng(9).derive(0);
  Rng child_a2 = parent.derive(0);
  CHECK(again.next_u64() == child_a2.next_u64());
}
