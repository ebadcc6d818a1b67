#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "botsense/checkpoint.h"
#include "botsense/gradcheck.h"
#include "botsense/layers.h"
#include "botsense/optim.h"

using namespace botsense;
namespace fs = std::filesystem;

namespace {

Tensor<double> random_tensor(Shape s, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Tensor<double> t(std::move(s));
  for (double& v : t.data) v = scale * standard_normal(rng);
  return t;
}

template <typename T>
LayerPtr<T> own(Layer<T>* l) {
  return LayerPtr<T>(l);
}

void require_grad_ok(Layer<double>& net, const Tensor<double>& x, GradCheckOptions opt = {}) {
  const GradCheckReport r = grad_check(net, x, opt);
  INFO(r.summary());
  CHECK(r.passed);
  CHECK(r.max_rel_err < 1e-4);
}

// Backward deliberately returns the negated gradients.
class SignFlippedDense : public Dense<double> {
 public:
  using Dense<double>::Dense;
  Tensor<double> backward(const Tensor<double>& g) override {
    Tensor<double> neg = g;
    for (double& v : neg.data) v = -v;
    return Dense<double>::backward(neg);
  }
};

double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("conv2d: 1x1 unit kernel with zero bias is the identity") {
  Rng rng(1);
  Conv2D<double> conv("c", 1, 1, 1, rng);
  conv.kernel.value.fill(1.0);
  const Tensor<double> x = random_tensor({2, 5, 4, 1}, 3);
  CHECK(conv.forward(x, true) == x);
}

TEST_CASE("conv2d: all-ones 3x3 input and kernel give 9 at the centre, fewer at the edges") {
  Rng rng(1);
  Conv2D<double> conv("c", 1, 1, 3, rng);
  conv.kernel.value.fill(1.0);
  const Tensor<double> y = conv.forward(Tensor<double>({1, 3, 3, 1}, 1.0), true);
  CHECK(y[4] == 9.0);
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 6.0);
}

TEST_CASE("conv2d: gradients match finite differences over 5 seeds") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Conv2D<double> conv("c", 2, 3, 3, rng);
    for (double& b : conv.bias.value.data) b = standard_normal(rng);
    require_grad_ok(conv, random_tensor({2, 5, 4, 2}, seed + 100));
  }
}

TEST_CASE("conv2d: channel mismatch and even kernels are rejected") {
  Rng rng(1);
  Conv2D<double> conv("c", 2, 3, 3, rng);
  CHECK_THROWS_AS(conv.forward(Tensor<double>({1, 4, 4, 3}), true), Error);
  CHECK_THROWS_AS(Conv2D<double>("c", 2, 3, 2, rng), Error);
}

TEST_CASE("maxpool2d: constant input routes the gradient to the first index of each window") {
  MaxPool2D<double> pool;
  const Tensor<double> y = pool.forward(Tensor<double>({1, 4, 4, 1}, 2.0), true);
  REQUIRE(y.shape == Shape{1, 2, 2, 1});
  for (double v : y.data) CHECK(v == 2.0);
  const Tensor<double> dx = pool.backward(Tensor<double>({1, 2, 2, 1}, 1.0));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) CHECK(dx[r * 4 + c] == ((r % 2 == 0 && c % 2 == 0) ? 1.0 : 0.0));
  }
}

TEST_CASE("maxpool2d: strictly increasing raster selects the bottom-right of each window") {
  MaxPool2D<double> pool;
  Tensor<double> x({1, 4, 4, 1});
  for (int i = 0; i < 16; ++i) x[i] = i;
  const Tensor<double> y = pool.forward(x, true);
  CHECK(y.data == std::vector<double>{5, 7, 13, 15});
}

TEST_CASE("maxpool2d: odd extents are padded with -inf") {
  MaxPool2D<double> pool;
  Tensor<double> x({1, 3, 3, 1}, -4.0);
  x[8] = -1.0;
  const Tensor<double> y = pool.forward(x, true);
  REQUIRE(y.shape == Shape{1, 2, 2, 1});
  CHECK(y.data == std::vector<double>{-4, -4, -4, -1});
}

TEST_CASE("maxpool2d: gradients match finite differences over 5 seeds") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MaxPool2D<double> pool;
    require_grad_ok(pool, random_tensor({2, 5, 6, 3}, seed));
  }
}

TEST_CASE("batchnorm: normalized batch passes through, degenerate affine gives beta") {
  BatchNorm<double> bn("bn", 1);
  const Tensor<double> x({4, 1}, std::vector<double>{-1, 1, -1, 1});
  const Tensor<double> y = bn.forward(x, true);
  for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-5));

  bn.gamma.value.fill(0.0);
  bn.beta.value.fill(5.0);
  for (double v : bn.forward(random_tensor({3, 2, 2, 1}, 4), true).data) CHECK(v == 5.0);
}

TEST_CASE("batchnorm: running statistics follow momentum 0.9 and drive infer mode") {
  BatchNorm<double> bn("bn", 1);
  const Tensor<double> x({4, 1}, std::vector<double>{1, 2, 3, 4});
  bn.forward(x, true);
  CHECK(bn.running_mean.value[0] == doctest::Approx(0.9 * 0 + 0.1 * 2.5));
  CHECK(bn.running_var.value[0] == doctest::Approx(0.9 * 1 + 0.1 * 1.25));
  const Tensor<double> y = bn.forward(Tensor<double>({1, 1}, 3.0), false);
  const double expect = (3.0 - 0.25) / std::sqrt(1.025 + 1e-5);
  CHECK(y[0] == doctest::Approx(expect));
}

TEST_CASE("batchnorm: batch of one in train mode stays finite") {
  BatchNorm<double> bn("bn", 2);
  const Tensor<double> y = bn.forward(Tensor<double>({1, 2}, 7.0), true);
  for (double v : y.data) {
    CHECK(std::isfinite(v));
    CHECK(v == 0.0);
  }
}

TEST_CASE("batchnorm: gradients match finite differences in both modes") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    BatchNorm<double> bn("bn", 3);
    Rng rng(seed);
    for (double& g : bn.gamma.value.data) g = 1.0 + 0.3 * standard_normal(rng);
    for (double& b : bn.beta.value.data) b = standard_normal(rng);
    const Tensor<double> x = random_tensor({2, 3, 3, 3}, seed + 50);
    require_grad_ok(bn, x);
    GradCheckOptions infer;
    infer.train_mode = false;
    require_grad_ok(bn, x, infer);
  }
}

TEST_CASE("dense: identity weights and relu on negatives") {
  Rng rng(1);
  Dense<double> d("d", 3, 3, Activation::None, rng);
  d.weight.value.fill(0.0);
  for (int i = 0; i < 3; ++i) d.weight.value[i * 3 + i] = 1.0;
  const Tensor<double> x = random_tensor({4, 3}, 2);
  CHECK(d.forward(x, true) == x);

  Dense<double> r("r", 3, 2, Activation::Relu, rng);
  r.weight.value.fill(1.0);
  for (double v : r.forward(Tensor<double>({2, 3}, -1.0), true).data) CHECK(v == 0.0);
  CHECK_THROWS_AS(r.forward(Tensor<double>({2, 4}), true), Error);
}

TEST_CASE("dense: gradients match finite differences for every activation") {
  for (Activation act : {Activation::None, Activation::Relu, Activation::Sigmoid}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      Dense<double> d("d", 4, 3, act, rng);
      for (double& b : d.bias.value.data) b = 0.5 * standard_normal(rng);
      require_grad_ok(d, random_tensor({5, 4}, seed + 9));
    }
  }
}

TEST_CASE("dropout: identity at p=0 and in infer mode") {
  const Tensor<double> x = random_tensor({10, 10}, 1);
  Dropout<double> zero(0.0, 1);
  CHECK(zero.forward(x, true) == x);
  CHECK(zero.forward(x, false) == x);
  Dropout<double> half(0.5, 1);
  CHECK(half.forward(x, false) == x);
  CHECK(half.backward(x) == x);
  CHECK_THROWS_AS(Dropout<double>(1.0, 1), Error);
  CHECK_THROWS_AS(Dropout<double>(-0.1, 1), Error);
}

TEST_CASE("dropout: p=0.5 preserves the mean within 5% over 1e5 elements") {
  Dropout<double> d(0.5, 42);
  const Tensor<double> x({100000}, 1.0);
  const Tensor<double> y = d.forward(x, true);
  double sum = 0.0;
  std::size_t zeros = 0;
  for (double v : y.data) {
    sum += v;
    zeros += v == 0.0;
    CHECK((v == 0.0 || v == 2.0));
  }
  CHECK(std::fabs(sum / 1e5 - 1.0) < 0.05);
  CHECK(zeros > 45000);
  // Backward reuses the forward mask.
  const Tensor<double> g = d.backward(x);
  CHECK(g == y);
}

TEST_CASE("dropout: reseeding reproduces the mask") {
  Dropout<double> d(0.3, 5);
  const Tensor<double> x({64}, 1.0);
  const Tensor<double> a = d.forward(x, true);
  const Tensor<double> b = d.forward(x, true);
  CHECK(a != b);
  d.reseed(5);
  CHECK(d.forward(x, true) == a);
}

TEST_CASE("lstm: one step matches a hand-computed cell") {
  Rng rng(1);
  LSTM<double> lstm("l", 1, 1, rng);
  const double wi = 0.3, wf = -0.2, wg = 0.5, wo = 0.7;
  lstm.w.value.data = {wi, wf, wg, wo};
  lstm.u.value.fill(0.4);
  lstm.b.value.data = {0.1, 1.0, -0.3, 0.2};
  REQUIRE(lstm.u.value.size() == 4);
  const double x = 0.8;
  const Tensor<double> h = lstm.forward(Tensor<double>({1, 1, 1}, x), true);
  const double i = sigm(wi * x + 0.1), g = std::tanh(wg * x - 0.3), o = sigm(wo * x + 0.2);
  const double c = i * g;  // previous cell state is zero
  CHECK(h[0] == doctest::Approx(o * std::tanh(c)).epsilon(1e-14));
}

TEST_CASE("lstm: zero input and zero weights") {
  Rng rng(1);
  LSTM<double> lstm("l", 2, 3, rng);
  CHECK(lstm.b.value.data == std::vector<double>{0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0});
  lstm.w.value.fill(0.0);
  lstm.u.value.fill(0.0);
  for (double v : lstm.forward(Tensor<double>({2, 4, 2}), true).data) CHECK(v == 0.0);

  // With a cell bias the state follows c_t = sig(1) c_{t-1} + sig(0) tanh(b_g).
  for (int j = 0; j < 3; ++j) lstm.b.value[6 + j] = 0.5;
  const Tensor<double> h = lstm.forward(Tensor<double>({1, 2, 2}), true);
  const double c1 = 0.5 * std::tanh(0.5);
  const double c2 = sigm(1.0) * c1 + c1;
  CHECK(h[0] == doctest::Approx(0.5 * std::tanh(c2)).epsilon(1e-14));
  CHECK(lstm.hidden_sequence()[0] == doctest::Approx(0.5 * std::tanh(c1)).epsilon(1e-14));
}

TEST_CASE("lstm: gradients match finite differences (T=3, D=2, U=2) over 5 seeds") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    LSTM<double> lstm("l", 2, 2, rng);
    for (double& b : lstm.b.value.data) b += 0.3 * standard_normal(rng);
    require_grad_ok(lstm, random_tensor({2, 3, 2}, seed + 77));
  }
}

TEST_CASE("lstm: empty sequences are rejected") {
  Rng rng(1);
  LSTM<double> lstm("l", 2, 2, rng);
  CHECK_THROWS_AS(lstm.forward(Tensor<double>({1, 0, 2}, std::vector<double>{}), true), Error);
}

TEST_CASE("time_distributed: identity block, shared parameters, summed gradients") {
  TimeDistributed<double> id(own<double>(new Dropout<double>(0.0, 1)));
  const Tensor<double> x = random_tensor({2, 3, 4}, 1);
  CHECK(id.forward(x, true) == x);

  Rng rng(3);
  TimeDistributed<double> td(own<double>(new Dense<double>("d", 4, 2, Activation::Sigmoid, rng)));
  auto& inner = static_cast<Dense<double>&>(*td.inner);
  const Tensor<double> seq = random_tensor({1, 2, 4}, 8);
  const Tensor<double> g = random_tensor({1, 2, 2}, 9);
  td.zero_grad();
  td.forward(seq, true);
  td.backward(g);
  const Tensor<double> combined = inner.weight.grad;

  Tensor<double> separate(inner.weight.value.shape);
  for (int t = 0; t < 2; ++t) {
    inner.zero_grad();
    Tensor<double> step({1, 4}, std::vector<double>(seq.data.begin() + t * 4, seq.data.begin() + t * 4 + 4));
    inner.forward(step, true);
    inner.backward(Tensor<double>({1, 2}, std::vector<double>(g.data.begin() + t * 2, g.data.begin() + t * 2 + 2)));
    for (std::size_t i = 0; i < separate.size(); ++i) separate[i] += inner.weight.grad[i];
  }
  for (std::size_t i = 0; i < separate.size(); ++i) CHECK(combined[i] == doctest::Approx(separate[i]).epsilon(1e-12));
  CHECK(td.params().size() == 2);
}

TEST_CASE("time_distributed: zero frames stay zero through a bias-free conv stack") {
  Rng rng(1);
  auto stack = std::make_unique<Sequential<double>>();
  stack->add(own<double>(new Conv2D<double>("c1", 2, 3, 3, rng, false)));
  stack->add(own<double>(new ReLU<double>()));
  stack->add(own<double>(new MaxPool2D<double>()));
  stack->add(own<double>(new Conv2D<double>("c2", 3, 2, 3, rng, false)));
  TimeDistributed<double> td(std::move(stack));
  Tensor<double> x = random_tensor({1, 3, 4, 4, 2}, 2);
  for (int i = 0; i < 32; ++i) x[i] = 0.0;  // first frame padded
  const Tensor<double> y = td.forward(x, true);
  REQUIRE(y.shape == Shape{1, 3, 2, 2, 2});
  for (int i = 0; i < 8; ++i) CHECK(y[i] == 0.0);
  bool nonzero = false;
  for (std::size_t i = 8; i < y.size(); ++i) nonzero |= y[i] != 0.0;
  CHECK(nonzero);
}

TEST_CASE("time_distributed: parameter count does not depend on T and gradients check") {
  Rng rng(4);
  auto block = std::make_unique<Sequential<double>>();
  block->add(own<double>(new Conv2D<double>("c", 1, 2, 3, rng)));
  block->add(own<double>(new ReLU<double>()));
  block->add(own<double>(new MaxPool2D<double>()));
  block->add(own<double>(new BatchNorm<double>("bn", 2)));
  block->add(own<double>(new Flatten<double>()));
  block->add(own<double>(new Dense<double>("d", 8, 3, Activation::Relu, rng)));
  TimeDistributed<double> td(std::move(block));
  std::size_t count = 0;
  for (auto* p : td.params()) count += p->value.size();
  td.forward(random_tensor({2, 1, 4, 4, 1}, 1), true);
  td.forward(random_tensor({2, 5, 4, 4, 1}, 1), true);
  std::size_t after = 0;
  for (auto* p : td.params()) after += p->value.size();
  CHECK(count == after);
  CHECK(count == 9 * 2 + 2 + 2 + 2 + 8 * 3 + 3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) require_grad_ok(td, random_tensor({2, 3, 4, 4, 1}, seed));
}

TEST_CASE("temporal_mean: averages over time and gradient checks") {
  TemporalMean<double> m;
  const Tensor<double> x({1, 2, 2}, std::vector<double>{1, 2, 3, 6});
  CHECK(m.forward(x, true).data == std::vector<double>{2, 4});
  require_grad_ok(m, random_tensor({3, 4, 2}, 1));
}

TEST_CASE("bce_loss: perfect predictions, ln 2 at one half, finite-difference gradient") {
  const LossResult<double> perfect =
      bce_loss(Tensor<double>({3}, std::vector<double>{1, 0, 1}), {1, 0, 1}, {1, 1, 1});
  CHECK(perfect.loss <= -std::log(1.0 - kBceClamp) + 1e-15);
  const LossResult<double> half = bce_loss(Tensor<double>({4}, 0.5), {1, 0, 1, 0}, {1, 1, 1, 1});
  CHECK(half.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Tensor<double> p({6});
    std::vector<double> y(6), w(6);
    for (int i = 0; i < 6; ++i) {
      p[i] = uniform(rng, 0.05, 0.95);
      y[i] = bernoulli(rng, 0.5);
      w[i] = uniform(rng, 0.2, 3.0);
    }
    const LossResult<double> r = bce_loss(p, y, w);
    for (int i = 0; i < 6; ++i) {
      Tensor<double> a = p, b = p;
      a[i] += 1e-5;
      b[i] -= 1e-5;
      const double num = (bce_loss(a, y, w).loss - bce_loss(b, y, w).loss) / 2e-5;
      CHECK(relative_error(r.grad[i], num) < 1e-6);
    }
  }
}

TEST_CASE("bce_loss: weights scale per-example terms and lengths must agree") {
  const Tensor<double> p({2}, std::vector<double>{0.2, 0.7});
  const double l0 = -std::log(0.8), l1 = -std::log(0.7);
  CHECK(bce_loss(p, {0, 1}, {2, 0.5}).loss == doctest::Approx((2 * l0 + 0.5 * l1) / 2));
  CHECK_THROWS_AS(bce_loss(p, {0}, {1, 1}), Error);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged but advances the step") {
  Param<double> p("p", Tensor<double>({3}, 1.5));
  Adam<double> adam({&p});
  adam.step();
  adam.step();
  CHECK(adam.steps() == 2);
  for (double v : p.value.data) CHECK(v == 1.5);
}

TEST_CASE("adam: one step with g=1 matches hand arithmetic") {
  Param<double> p("p", Tensor<double>({1}, 0.0));
  p.grad.fill(1.0);
  Adam<double> adam({&p});
  adam.step();
  const double m = 0.1, v = 0.001;
  const double mhat = m / (1 - 0.9), vhat = v / (1 - 0.999);
  CHECK(p.value[0] == doctest::Approx(-1e-3 * mhat / (std::sqrt(vhat) + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam: constant gradient gives steps of magnitude lr within 1%") {
  Param<double> p("p", Tensor<double>({2}, 0.0));
  Adam<double> adam({&p});
  double prev0 = 0.0, prev1 = 0.0;
  for (int k = 0; k < 1000; ++k) {
    p.grad.data = {0.37, -4.0};
    prev0 = p.value[0];
    prev1 = p.value[1];
    adam.step();
  }
  CHECK(std::fabs(std::fabs(p.value[0] - prev0) - 1e-3) < 1e-5);
  CHECK(p.value[0] < prev0);
  CHECK(std::fabs(std::fabs(p.value[1] - prev1) - 1e-3) < 1e-5);
  CHECK(p.value[1] > prev1);
}

TEST_CASE("grad_check: a linear single-dense net is exact to 1e-8") {
  Rng rng(1);
  Dense<double> d("d", 5, 3, Activation::None, rng);
  const GradCheckReport r = grad_check(d, random_tensor({4, 5}, 2));
  INFO(r.summary());
  CHECK(r.passed);
  CHECK(r.max_rel_err < 1e-8);
  CHECK(r.entries.size() == 3);
}

TEST_CASE("grad_check: a sign-flipped backward produces a failing report naming the parameters") {
  Rng rng(1);
  SignFlippedDense d("bad", 3, 2, Activation::Sigmoid, rng);
  const GradCheckReport r = grad_check(d, random_tensor({4, 3}, 2));
  CHECK_FALSE(r.passed);
  CHECK(r.failures == std::vector<std::string>{"bad.weight", "bad.bias", "input"});
  CHECK(r.summary().find("FAIL") != std::string::npos);

  Dense<double> good("good", 3, 2, Activation::Sigmoid, rng);
  GradCheckOptions corrupt;
  corrupt.corrupt_backward = true;
  CHECK_FALSE(grad_check(good, random_tensor({4, 3}, 2), corrupt).passed);
  CHECK(grad_check(good, random_tensor({4, 3}, 2)).passed);
}

TEST_CASE("grad_check: dropout masks are held fixed and batchnorm buffers restored") {
  Rng rng(2);
  Sequential<double> net;
  net.add(own<double>(new Dense<double>("d1", 4, 6, Activation::Relu, rng)));
  net.add(own<double>(new Dropout<double>(0.4, 3)));
  net.add(own<double>(new BatchNorm<double>("bn", 6)));
  net.add(own<double>(new Dense<double>("d2", 6, 1, Activation::Sigmoid, rng)));
  auto* bn = static_cast<BatchNorm<double>*>(net.layers[2].get());
  const Tensor<double> before = bn->running_mean.value;
  require_grad_ok(net, random_tensor({5, 4}, 11));
  CHECK(bn->running_mean.value == before);
}

TEST_CASE("sequential: non-finite activations raise a numeric error") {
  Rng rng(1);
  Sequential<double> net;
  net.add(own<double>(new Dense<double>("d", 2, 2, Activation::None, rng)));
  Tensor<double> x({1, 2}, 1.0);
  x[0] = std::nan("");
  try {
    net.forward(x, true);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.category() == "numeric");
  }
}

TEST_CASE("checkpoint: save/load round trip is bit-exact in both precisions") {
  Rng rng(9);
  Dense<float> f("f", 3, 4, Activation::Relu, rng);
  Dense<double> d("d", 2, 2, Activation::None, rng);
  f.bias.value[1] = -0.0f;
  std::vector<CheckpointTensor> saved = {to_checkpoint(f.weight), to_checkpoint(f.bias)};
  const std::string bytes = encode_checkpoint(saved);
  CHECK(bytes.substr(0, 5) == "BSNN1");

  Rng other(10);
  Dense<float> g("f", 3, 4, Activation::Relu, other);
  load_params(decode_checkpoint(bytes), g.params());
  CHECK(std::memcmp(g.weight.value.ptr(), f.weight.value.ptr(), 12 * sizeof(float)) == 0);
  CHECK(std::signbit(g.bias.value[1]));
  CHECK(encode_checkpoint({to_checkpoint(g.weight), to_checkpoint(g.bias)}) == bytes);

  const fs::path path = fs::temp_directory_path() / "botsense_test_ckpt.bsnn";
  write_checkpoint_file(path.string(), {to_checkpoint(d.weight), to_checkpoint(d.bias)});
  Dense<double> e("d", 2, 2, Activation::None, other);
  load_params(read_checkpoint_file(path.string()), e.params());
  CHECK(e.weight.value == d.weight.value);
  fs::remove(path);
}

TEST_CASE("checkpoint: malformed or mismatched files are rejected") {
  Rng rng(1);
  Dense<float> f("f", 3, 4, Activation::Relu, rng);
  const std::string bytes = encode_checkpoint({to_checkpoint(f.weight), to_checkpoint(f.bias)});
  CHECK_THROWS_AS(decode_checkpoint("BSNN2" + bytes.substr(5)), Error);
  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), Error);

  Dense<float> wrong("f", 4, 4, Activation::Relu, rng);
  CHECK_THROWS_AS(load_params(decode_checkpoint(bytes), wrong.params()), Error);
  Dense<float> renamed("g", 3, 4, Activation::Relu, rng);
  CHECK_THROWS_AS(load_params(decode_checkpoint(bytes), renamed.params()), Error);
  Dense<double> precision("f", 3, 4, Activation::Relu, rng);
  CHECK_THROWS_AS(load_params(decode_checkpoint(bytes), precision.params()), Error);
  CHECK_THROWS_AS(load_params(decode_checkpoint(encode_checkpoint({to_checkpoint(f.weight)})), f.params()), Error);
}
