#include <doctest.h>

#include <cmath>
#include <random>

#include "evcoref/neuralcore.hpp"

using namespace evcoref;

TEST_CASE("dense_forward identity wiring passes input through") {
  DenseLayer layer(3, 3, Activation::Identity);
  for (int i = 0; i < 3; ++i) layer.w.at(i, i) = 1.0;
  Vec x = {0.3, -1.2, 4.0};
  CHECK(layer.forward(x) == x);
}

TEST_CASE("dense_forward zero weights with tanh gives zeros") {
  DenseLayer layer(4, 2, Activation::Tanh);
  Vec y = layer.forward({1.0, 2.0, 3.0, 4.0});
  CHECK(y == Vec{0.0, 0.0});
}

TEST_CASE("dense_forward 1x1 tanh saturates") {
  DenseLayer layer(1, 1, Activation::Tanh);
  layer.w.at(0, 0) = 1.0;
  Vec y = layer.forward({10.0});
  CHECK(y[0] == doctest::Approx(std::tanh(10.0)).epsilon(1e-12));
  CHECK(y[0] > 0.99999999);
}

TEST_CASE("dense_forward rejects dimension mismatch") {
  DenseLayer layer(3, 2, Activation::Identity);
  CHECK_THROWS_AS(layer.forward({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("softmax symmetry and shift invariance") {
  Vec p = softmax({0.0, 0.0});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  Vec q = softmax({3.7, 3.7, 3.7});
  for (double v : q) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = {d(rng), d(rng), d(rng), d(rng)};
    Vec shifted = x;
    for (double& v : shifted) v += 2.5;
    Vec a = softmax(x), b = softmax(shifted);
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
      CHECK(a[i] > 0.0);
      sum += a[i];
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("softmax survives huge logits") {
  Vec p = softmax({1000.0, 0.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(std::isfinite(p[0]));
}

TEST_CASE("cross_entropy reference values") {
  CHECK(cross_entropy(0.5, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cross_entropy(0.5, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // y=0, y_hat=0.25 -> -ln 0.75
  CHECK(cross_entropy(0.25, 0) ==
        doctest::Approx(-std::log(0.75)).epsilon(1e-12));
  // perfect prediction saturates to the clamp, still >= 0
  bool clamped = false;
  double loss = cross_entropy(1.0, 1, &clamped);
  CHECK(clamped);
  CHECK(loss == doctest::Approx(-std::log(1.0 - 1e-7)));
  CHECK(loss >= 0.0);
}

TEST_CASE("cross_entropy is nonnegative across the domain") {
  for (double p = 0.0; p <= 1.0; p += 0.01)
    for (int y : {0, 1}) CHECK(cross_entropy(p, y) >= 0.0);
}

TEST_CASE("similarity_loss reference values") {
  CHECK(similarity_loss(0.0, 0) == doctest::Approx(0.0));  // ln|1-0|
  CHECK(similarity_loss(0.9, 0) ==
        doctest::Approx(std::log(0.1)).epsilon(1e-9));
  bool clamped = false;
  CHECK(similarity_loss(1.0, 0, &clamped) ==
        doctest::Approx(std::log(1e-4)).epsilon(1e-12));
  CHECK(clamped);
}

TEST_CASE("similarity_loss bounds and monotonicity") {
  double lo = std::log(1e-4), hi = std::log(2.0);
  double prev = -1e100;
  // |m - s| sweeps 0..2 as s goes from 1 to -1 with m = +1
  for (double s = 1.0; s >= -1.0; s -= 0.01) {
    double loss = similarity_loss(s, 0);
    CHECK(loss >= lo - 1e-12);
    CHECK(loss <= hi + 1e-12);
    CHECK(loss >= prev - 1e-12);  // larger gap never decreases the loss
    prev = loss;
  }
}

TEST_CASE("similarity margin follows the label") {
  CHECK(similarity_margin(0) == 1.0);
  CHECK(similarity_margin(1) == -1.0);
}

TEST_CASE("cosine similarity basics") {
  CHECK(cosine_similarity({1.0, 2.0}, {1.0, 2.0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity({1.0, 0.0}, {0.0, 3.0}) == doctest::Approx(0.0));
  CHECK(cosine_similarity({1.0, 2.0}, {-1.0, -2.0}) == doctest::Approx(-1.0));
}

TEST_CASE("cosine similarity zero-norm guard") {
  bool zero = false;
  CHECK(cosine_similarity({0.0, 0.0}, {1.0, 1.0}, &zero) == 0.0);
  CHECK(zero);
}

TEST_CASE("cosine similarity scale invariance") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u = {d(rng), d(rng), d(rng)};
    Vec v = {d(rng), d(rng), d(rng)};
    double alpha = 0.01 + std::fabs(d(rng)) * 10.0;
    double beta = 0.01 + std::fabs(d(rng)) * 10.0;
    Vec su = u, sv = v;
    for (double& x : su) x *= alpha;
    for (double& x : sv) x *= beta;
    CHECK(cosine_similarity(u, v) ==
          doctest::Approx(cosine_similarity(su, sv)).epsilon(1e-10));
  }
}

TEST_CASE("total_loss is plain addition") {
  CHECK(total_loss(0.5, -1.0) == doctest::Approx(-0.5));
  CHECK(total_loss(0.0, 0.0) == 0.0);
  CHECK(total_loss(std::log(2.0), std::log(0.1)) ==
        doctest::Approx(0.6931471805599453 - 2.302585092994046).epsilon(1e-12));
}

TEST_CASE("adadelta first scalar step matches the hand-computed update") {
  Vec value = {0.0};
  Vec grad = {1.0};
  std::vector<ParamView> params = {{"x", &value, &grad, 0}};
  AdadeltaState state;
  adadelta_step(params, state);
  CHECK(state.acc_grad[0][0] == doctest::Approx(0.05).epsilon(1e-12));
  double expected = -std::sqrt(1e-6) / std::sqrt(0.05 + 1e-6);
  CHECK(value[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(value[0] == doctest::Approx(-0.004472).epsilon(1e-3));
}

TEST_CASE("adadelta with zero gradient is a parameter no-op") {
  Vec value = {1.5, -2.0};
  Vec grad = {0.7, 0.1};
  std::vector<ParamView> params = {{"x", &value, &grad, 0}};
  AdadeltaState state;
  adadelta_step(params, state);
  Vec after_first = value;
  double eg2 = state.acc_grad[0][0];
  grad = {0.0, 0.0};
  adadelta_step(params, state);
  CHECK(value == after_first);
  CHECK(state.acc_grad[0][0] == doctest::Approx(0.95 * eg2).epsilon(1e-12));
}

TEST_CASE("adadelta accumulators stay nonnegative under random gradients") {
  Vec value(4, 0.0), grad(4, 0.0);
  std::vector<ParamView> params = {{"x", &value, &grad, 0}};
  AdadeltaState state;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 2.0);
  for (int step = 0; step < 200; ++step) {
    for (double& g : grad) g = d(rng);
    adadelta_step(params, state);
    for (double v : state.acc_grad[0]) CHECK(v >= 0.0);
    for (double v : state.acc_update[0]) CHECK(v >= 0.0);
  }
}

TEST_CASE("adadelta respects frozen prefixes") {
  Vec value = {0.0, 0.0};
  Vec grad = {1.0, 1.0};
  std::vector<ParamView> params = {{"x", &value, &grad, 1}};
  AdadeltaState state;
  adadelta_step(params, state);
  CHECK(value[0] == 0.0);
  CHECK(value[1] != 0.0);
}

TEST_CASE("dense layer gradients match finite differences") {
  // softmax-CE over a single dense layer, checked against central
  // differences through the generic harness
  std::mt19937_64 rng(4);
  DenseLayer layer(3, 2, Activation::Tanh);
  DenseLayer out(2, 2, Activation::Identity);
  init_dense(layer, rng);
  init_dense(out, rng);
  Vec x = {0.4, -0.7, 0.2};
  int label = 1;

  auto loss_eval = [&]() {
    Vec h = layer.forward(x);
    Vec probs = softmax(out.forward(h));
    LossEval e;
    e.loss = cross_entropy(probs[1], label, &e.clamped);
    return e;
  };

  // analytic pass
  std::vector<ParamView> params = {
      {"layer.w", &layer.w.a, &layer.gw.a, 0},
      {"layer.b", &layer.b, &layer.gb, 0},
      {"out.w", &out.w.a, &out.gw.a, 0},
      {"out.b", &out.b, &out.gb, 0},
  };
  zero_param_grads(params);
  Vec h = layer.forward(x);
  Vec logits = out.forward(h);
  Vec probs = softmax(logits);
  Vec dlogits = probs;
  dlogits[label] -= 1.0;
  Vec dh = out.backward(h, logits, dlogits);
  layer.backward(x, h, dh);

  auto result = gradient_check(params, loss_eval);
  CHECK(result.checked > 0);
  CHECK(result.max_rel_err < 1e-6);
}

TEST_CASE("softmax-CE gradient at uniform output is p minus onehot") {
  DenseLayer out(2, 2, Activation::Identity);  // zero weights
  Vec h = {0.3, -0.3};
  Vec logits = out.forward(h);
  Vec probs = softmax(logits);
  CHECK(probs[0] == doctest::Approx(0.5));
  Vec dlogits = probs;
  dlogits[0] -= 1.0;
  CHECK(dlogits[0] == doctest::Approx(-0.5));
  CHECK(dlogits[1] == doctest::Approx(0.5));
}

TEST_CASE("check_finite flags non-finite gradients with the parameter path") {
  Vec value = {1.0};
  Vec grad = {std::numeric_limits<double>::quiet_NaN()};
  std::vector<ParamView> params = {{"layer.w", &value, &grad, 0}};
  CHECK_THROWS_WITH_AS(check_finite(params), doctest::Contains("layer.w"),
                       NumericError);
}
