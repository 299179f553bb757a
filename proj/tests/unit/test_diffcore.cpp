#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "op_cases.hpp"
#include "test_support.hpp"
#include "tsaae/diff/gradcheck.hpp"
#include "tsaae/diff/init.hpp"
#include "tsaae/diff/ops.hpp"
#include "tsaae/diff/optim.hpp"
#include "tsaae/error.hpp"
#include "tsaae/model/layers.hpp"

using namespace tsaae;
using diff::Tensor;

namespace {

Tensor mat(std::size_t r, std::size_t c, std::vector<double> v, bool grad = false) {
  return Tensor::matrix(r, c, std::move(v), grad);
}

void expect_values(const Tensor& t, const std::vector<double>& want, double tol = 0.0) {
  ASSERT_EQ(t.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(t[i], want[i], tol) << "index " << i;
}

}  // namespace

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Tensor eye = mat(2, 2, {1, 0, 0, 1});
  expect_values(diff::matmul(eye, mat(2, 2, {1, 2, 3, 4})), {1, 2, 3, 4});
}

TEST(Matmul, HandComputedProduct) {
  const Tensor p = diff::matmul(mat(2, 2, {1, 2, 3, 4}), mat(2, 1, {5, 6}));
  EXPECT_EQ(p.shape(), (diff::Shape{2, 1}));
  expect_values(p, {17, 39});
}

TEST(Matmul, MismatchNamesBothShapes) {
  try {
    diff::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 2}));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x3"), std::string::npos) << what;
    EXPECT_NE(what.find("2x2"), std::string::npos) << what;
  }
}

TEST(Matmul, BackwardMatchesTransposeRule) {
  const Tensor a = mat(2, 2, {1, 2, 3, 4}, true);
  const Tensor b = mat(2, 1, {5, 6}, true);
  diff::backward(diff::sum(diff::matmul(a, b)));
  // dL/da = 1·bᵀ per row, dL/db = aᵀ·1.
  expect_values(Tensor::from({4}, {a.grad().begin(), a.grad().end()}), {5, 6, 5, 6});
  expect_values(Tensor::from({2}, {b.grad().begin(), b.grad().end()}), {4, 6});
}

TEST(Softmax, UniformLogits) {
  expect_values(diff::softmax_rows(mat(1, 3, {0, 0, 0})), {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15);
}

TEST(Softmax, MaskSentinelMapsToExactZero) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const Tensor s = diff::softmax_rows(mat(1, 2, {0, ninf}));
  EXPECT_EQ(s[0], 1.0);
  EXPECT_EQ(s[1], 0.0);
}

TEST(Softmax, DirectEvaluation) {
  const Tensor s = diff::softmax_rows(mat(1, 2, {1, 2}));
  const double e1 = std::exp(1.0), e2 = std::exp(2.0);
  EXPECT_NEAR(s[0], e1 / (e1 + e2), 1e-15);
  EXPECT_NEAR(s[1], e2 / (e1 + e2), 1e-15);
  EXPECT_NEAR(s[0], 0.2689414213699951, 1e-15);
}

TEST(Softmax, AllMaskedRowThrows) {
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(diff::softmax_rows(mat(2, 2, {0, 1, ninf, ninf})), NumericError);
}

TEST(Softmax, RowsAreDistributions) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor x = mat(4, 7, testkit::uniform_values(28, rng, -30, 30));
    const Tensor s = diff::softmax_rows(x);
    for (std::size_t r = 0; r < 4; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < 7; ++c) {
        EXPECT_GE(s.at(r, c), 0.0);
        total += s.at(r, c);
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Elementwise, KnownValues) {
  EXPECT_EQ(diff::tanh(Tensor::scalar(0.0)).item(), 0.0);
  EXPECT_EQ(diff::sigmoid(Tensor::scalar(0.0)).item(), 0.5);
  EXPECT_NEAR(diff::tanh(Tensor::scalar(10.0)).item(), std::tanh(10.0), 0.0);
  EXPECT_NEAR(diff::tanh(Tensor::scalar(10.0)).item(), 0.9999999958776927, 1e-16);
  EXPECT_EQ(diff::relu(mat(1, 2, {-1, 2}))[0], 0.0);
  EXPECT_EQ(diff::activate(Tensor::scalar(-4.0), diff::Activation::linear).item(), -4.0);
}

TEST(LayerNorm, ConstantRowIsZero) {
  const Tensor y = diff::layer_norm(mat(1, 3, {5, 5, 5}), Tensor::full({3}, 1.0), Tensor::zeros({3}));
  expect_values(y, {0, 0, 0});
}

TEST(LayerNorm, TwoPointRow) {
  const double s = 1.0 / std::sqrt(1.0 + diff::kLayerNormEpsilon);
  expect_values(diff::layer_norm(mat(1, 2, {1, 3}), Tensor::full({2}, 1.0), Tensor::zeros({2})), {-s, s}, 1e-15);
  EXPECT_NEAR(s, 1.0, 1e-5);
}

TEST(LayerNorm, AffineApplied) {
  const double s = 1.0 / std::sqrt(1.0 + diff::kLayerNormEpsilon);
  expect_values(diff::layer_norm(mat(1, 2, {1, 3}), Tensor::full({2}, 2.0), Tensor::full({2}, 1.0)),
                {1 - 2 * s, 1 + 2 * s}, 1e-15);
}

TEST(Backward, SumGivesOnes) {
  Tensor w = mat(2, 2, {1, 2, 3, 4}, true);
  const Tensor loss = diff::sum(w);
  diff::backward(loss);
  for (double g : w.grad()) EXPECT_EQ(g, 1.0);
  EXPECT_EQ(loss.grad()[0], 1.0);
}

TEST(Backward, SquareGivesTwiceValue) {
  Tensor w = mat(2, 2, {1, 2, 3, 4}, true);
  diff::backward(diff::sum(diff::mul(w, w)));
  const std::vector<double> want{2, 4, 6, 8};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(w.grad()[i], want[i]);
}

TEST(Backward, DetachedLossLeavesGradEmpty) {
  Tensor w = mat(2, 2, {1, 2, 3, 4}, true);
  diff::backward(diff::sum(w.detach()));
  EXPECT_FALSE(w.has_grad());
}

TEST(Backward, RepeatedCallsAccumulate) {
  Tensor w = mat(1, 2, {1, 2}, true);
  diff::backward(diff::sum(diff::square(w)));
  diff::backward(diff::sum(diff::square(w)));
  EXPECT_EQ(w.grad()[0], 4.0);
  EXPECT_EQ(w.grad()[1], 8.0);
}

TEST(Backward, NonScalarLossIsContractError) {
  Tensor w = mat(1, 2, {1, 2}, true);
  EXPECT_THROW(diff::backward(diff::square(w)), ContractError);
}

TEST(Backward, NoGradGuardRecordsNothing) {
  Tensor w = mat(1, 2, {1, 2}, true);
  Tensor y;
  {
    diff::NoGradGuard guard;
    y = diff::square(w);
  }
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(y.is_leaf());
}

TEST(Backward, DeepChainDoesNotOverflowTheStack) {
  Tensor w = Tensor::scalar(1.0, true);
  Tensor y = w;
  for (int i = 0; i < 200000; ++i) y = diff::add_scalar(y, 0.0);
  diff::backward(y);
  EXPECT_EQ(w.grad()[0], 1.0);
}

TEST(GradCheck, QuadraticIsExact) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {2, 3});
  std::mt19937_64 rng(1);
  std::copy_n(testkit::uniform_values(6, rng).begin(), 6, w.mutable_values().begin());
  const auto result = diff::grad_check([](const diff::ParameterStore& s) { return diff::sum(diff::square(s.get("w"))); }, store);
  EXPECT_LT(result.max_relative_error, 1e-8);
  EXPECT_EQ(result.coordinates, 6u);
}

TEST(GradCheck, AttentionBlock) {
  diff::ParameterStore store;
  const auto params = model::AttentionParams::create(store, "attn", 4);
  Tensor x = store.add("x", {5, 4});
  std::mt19937_64 rng(2);
  diff::init_xavier(store, rng);
  for (auto& v : x.mutable_values()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (auto& e : store.entries())
    if (e.kind == diff::ParamKind::bias)
      for (auto& v : e.tensor.mutable_values()) v = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
  const Tensor weights = mat(5, 4, testkit::uniform_values(20, rng));
  const Tensor mask = model::causal_mask(5);
  const auto result = diff::grad_check(
      [&](const diff::ParameterStore& s) {
        const Tensor& in = s.get("x");
        return diff::sum(diff::mul(model::multi_head_attention(in, in, in, mask, params, 2), weights));
      },
      store);
  EXPECT_LT(result.max_relative_error, 1e-4) << result.worst_parameter << "[" << result.worst_index << "] a=" << result.analytic << " n=" << result.numeric;
}

TEST(GradCheck, WrongBackwardIsDetected) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {3});
  for (std::size_t i = 0; i < 3; ++i) w.mutable_values()[i] = 0.5 + static_cast<double>(i);
  // Cube with a deliberately wrong derivative (2x instead of 3x²).
  auto bad_cube = [](const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * x[i] * x[i];
    return diff::make_result(x.shape(), std::move(out), {x}, [](diff::detail::Node& self) {
      auto& p = *self.parents[0];
      auto& g = p.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * 2.0 * p.value[i];
    });
  };
  const auto result = diff::grad_check([&](const diff::ParameterStore& s) { return diff::sum(bad_cube(s.get("w"))); }, store);
  EXPECT_GT(result.max_relative_error, 1e-2);
  EXPECT_EQ(result.worst_parameter, "w");
}

TEST(GradCheck, EpsilonOutOfRange) {
  diff::ParameterStore store;
  store.add("w", {1});
  auto loss = [](const diff::ParameterStore& s) { return diff::sum(s.get("w")); };
  EXPECT_THROW(diff::grad_check(loss, store, 1e-2), ContractError);
  EXPECT_THROW(diff::grad_check(loss, store, 1e-9), ContractError);
}

TEST(GradCheck, NonFiniteLossNamesParameter) {
  diff::ParameterStore store;
  Tensor w = store.add("weights", {1});
  w.mutable_values()[0] = 1e-6;
  try {
    diff::grad_check([](const diff::ParameterStore& s) { return diff::sum(diff::log(s.get("weights"))); }, store);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("weights"), std::string::npos);
  }
}

class OpGradient : public ::testing::TestWithParam<std::string> {};

TEST_P(OpGradient, MatchesCentralDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto result = testkit::op_grad_check(GetParam(), seed);
    EXPECT_LE(result.max_relative_error, 1e-4)
        << GetParam() << " seed " << seed << ": " << result.worst_parameter << "[" << result.worst_index << "]";
  }
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradient, ::testing::ValuesIn(testkit::op_names()));

TEST(Conv, TransposeIsAdjoint) {
  // <conv(x), y> == <x, convT(y)> with shared weights laid out per op.
  std::mt19937_64 rng(5);
  const std::size_t cin = 2, cout = 3, k = 4, len = 7;
  const Tensor x = mat(cin, len, testkit::uniform_values(cin * len, rng));
  const Tensor y = mat(cout, len, testkit::uniform_values(cout * len, rng));
  const auto w = testkit::uniform_values(cout * cin * k, rng);
  const Tensor wf = mat(cout, cin * k, w);
  const Tensor fx = diff::conv1d(x, wf, Tensor::zeros({cout}), k);
  const Tensor ty = diff::conv_transpose1d(y, wf, Tensor::zeros({cin}), k);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) lhs += fx[i] * y[i];
  for (std::size_t i = 0; i < ty.size(); ++i) rhs += ty[i] * x[i];
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(Init, XavierBounds) {
  diff::ParameterStore store;
  Tensor one = store.add("one", {1, 1});
  Tensor three = store.add("three", {3, 3});
  Tensor bias = store.add("bias", {3}, diff::ParamKind::bias);
  Tensor gain = store.add("gain", {3}, diff::ParamKind::gain);
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    diff::init_xavier(store, rng);
    EXPECT_LE(std::abs(one[0]), std::sqrt(3.0));
    for (double v : three.values()) EXPECT_LE(std::abs(v), 1.0);
    for (double v : bias.values()) EXPECT_EQ(v, 0.0);
    for (double v : gain.values()) EXPECT_EQ(v, 1.0);
  }
}

TEST(Init, NormalStatistics) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {100, 100});
  std::mt19937_64 rng(42);
  diff::init_normal(store, 0.02, rng);
  double mean = 0.0;
  for (double v : w.values()) mean += v;
  mean /= 1e4;
  double var = 0.0;
  for (double v : w.values()) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (1e4 - 1));
  EXPECT_LT(std::abs(mean), 3 * 0.02 / 100);
  EXPECT_GE(sd, 0.019);
  EXPECT_LE(sd, 0.021);
}

TEST(Init, NormalRejectsZeroStddev) {
  diff::ParameterStore store;
  store.add("w", {2, 2});
  std::mt19937_64 rng(0);
  EXPECT_THROW(diff::init_normal(store, 0.0, rng), ConfigError);
}

TEST(Init, SeededDrawsRepeat) {
  diff::ParameterStore a, b;
  Tensor wa = a.add("w", {4, 5}), wb = b.add("w", {4, 5});
  std::mt19937_64 ra(9), rb(9);
  diff::init_normal(a, 0.02, ra);
  diff::init_normal(b, 0.02, rb);
  EXPECT_TRUE(std::equal(wa.values().begin(), wa.values().end(), wb.values().begin()));
}

TEST(Optimizer, AdamFirstStep) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {1});
  w.mutable_grad()[0] = 1.0;
  diff::optimizer_step(store, diff::OptimizerConfig::adam(1e-4));
  EXPECT_NEAR(w[0], -1e-4 / (1.0 + 1e-8), 1e-18);
  EXPECT_FALSE(w.has_grad());
}

TEST(Optimizer, AdamZeroGradientKeepsValue) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {2});
  w.mutable_values()[0] = 0.25;
  w.mutable_grad();
  diff::optimizer_step(store, diff::OptimizerConfig::adam(1e-3));
  EXPECT_EQ(w[0], 0.25);
  EXPECT_EQ(w[1], 0.0);
}

TEST(Optimizer, RmspropFirstStep) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {1});
  w.mutable_grad()[0] = 1.0;
  diff::optimizer_step(store, diff::OptimizerConfig::rmsprop(5e-5));
  EXPECT_NEAR(w[0], -5e-5 / (std::sqrt(0.01) + 1e-8), 1e-18);
  EXPECT_NEAR(w[0], -5e-4, 1e-10);
}

TEST(Optimizer, MissingGradientsAreContractError) {
  diff::ParameterStore store;
  store.add("w", {1});
  EXPECT_THROW(diff::optimizer_step(store, diff::OptimizerConfig::adam(1e-4)), ContractError);
}

TEST(Optimizer, InvalidConfigRejected) {
  EXPECT_THROW(diff::OptimizerConfig::adam(0.0).validate(), ConfigError);
  auto c = diff::OptimizerConfig::adam(1e-3);
  c.beta1 = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Optimizer, TrajectoryIsBitIdenticalAcrossRuns) {
  auto run = [] {
    diff::ParameterStore store;
    Tensor w = store.add("w", {3, 3});
    std::mt19937_64 rng(4);
    diff::init_xavier(store, rng);
    for (int step = 0; step < 20; ++step) {
      diff::backward(diff::sum(diff::square(diff::tanh(w))));
      diff::optimizer_step(store, diff::OptimizerConfig::adam(1e-2));
    }
    return std::vector<double>(w.values().begin(), w.values().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(Clip, ClampsIntoBound) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {3});
  w.mutable_values()[0] = 0.5;
  w.mutable_values()[1] = -0.05;
  w.mutable_values()[2] = -0.2;
  diff::clip_weights(store, 0.1);
  EXPECT_EQ(w[0], 0.1);
  EXPECT_EQ(w[1], -0.05);
  EXPECT_EQ(w[2], -0.1);
}

TEST(Clip, Idempotent) {
  diff::ParameterStore store;
  Tensor w = store.add("w", {50});
  std::mt19937_64 rng(8);
  const auto v = testkit::uniform_values(50, rng, -2, 2);
  std::copy(v.begin(), v.end(), w.mutable_values().begin());
  diff::clip_weights(store, 0.3);
  const std::vector<double> once(w.values().begin(), w.values().end());
  diff::clip_weights(store, 0.3);
  EXPECT_EQ(once, std::vector<double>(w.values().begin(), w.values().end()));
}

TEST(Clip, RejectsNonPositiveBound) {
  diff::ParameterStore store;
  store.add("w", {1});
  EXPECT_THROW(diff::clip_weights(store, 0.0), ConfigError);
}

TEST(ParameterStore, NamesAreUniqueAndOrdered) {
  diff::ParameterStore store;
  store.add("b", {1});
  store.add("a", {2});
  EXPECT_THROW(store.add("a", {1}), ContractError);
  EXPECT_EQ(store.names(), (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(store.parameter_count(), 3u);
}

TEST(ParameterStore, SubsetSharesTensorsNotState) {
  diff::ParameterStore store;
  Tensor a = store.add("dec.w", {2});
  store.add("enc.w", {2});
  auto sub = store.subset({"dec."});
  ASSERT_EQ(sub.size(), 1u);
  sub.get("dec.w").mutable_values()[0] = 3.0;
  EXPECT_EQ(a[0], 3.0);
  a.mutable_grad()[0] = 1.0;
  diff::optimizer_step(sub, diff::OptimizerConfig::adam(0.1));
  EXPECT_EQ(store.entry("dec.w").state.first.size(), 0u);
  EXPECT_EQ(sub.entry("dec.w").state.first.size(), 2u);
}
