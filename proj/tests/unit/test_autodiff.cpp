// Copyright 2026 The PAPO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "papo/adam.hpp"
#include "papo/autodiff.hpp"
#include "papo/errors.hpp"
#include "papo/layers.hpp"
#include "papo/types.hpp"

namespace papo {
namespace {

using Mat = Matrix<double>;
using Fn = std::function<Var<double>(Tape<double>&, const std::vector<Var<double>>&)>;

Mat random_matrix(Rng& rng, Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = lo + (hi - lo) * uniform01(rng);
  return m;
}

double evaluate(const Fn& f, const std::vector<Mat>& inputs) {
  Tape<double> tape;
  std::vector<Var<double>> vars;
  for (const auto& m : inputs) vars.push_back(tape.constant(m));
  return f(tape, vars).scalar();
}

// Largest relative error between tape gradients and central differences.
double gradient_error(const Fn& f, std::vector<Mat> inputs) {
  std::vector<Parameter<double>> params;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    params.emplace_back("x" + std::to_string(i), inputs[i]);
  }
  Tape<double> tape;
  std::vector<Var<double>> vars;
  for (auto& p : params) vars.push_back(tape.parameter(p));
  tape.backward(f(tape, vars));
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (Index k = 0; k < inputs[i].size(); ++k) {
      const double x = inputs[i].data()[k];
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      inputs[i].data()[k] = x + h;
      const double up = evaluate(f, inputs);
      inputs[i].data()[k] = x - h;
      const double down = evaluate(f, inputs);
      inputs[i].data()[k] = x;
      const double fd = (up - down) / (2.0 * h);
      const double g = params[i].grad.data()[k];
      worst = std::max(worst, std::abs(g - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  return worst;
}

// Weighted sum so every output element gets a distinct upstream gradient.
Var<double> project(Tape<double>& tape, const Var<double>& v) {
  Mat w(v.rows(), v.cols());
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = 0.3 + 0.17 * static_cast<double>(i % 7);
  return sum(hadamard(v, tape.constant(w)));
}

struct OpCase {
  const char* name;
  std::vector<std::pair<Index, Index>> shapes;
  Fn f;
  double lo = -1.0;
  double hi = 1.0;
};

class GradientCheck : public ::testing::TestWithParam<int> {};

std::vector<OpCase> op_cases() {
  using V = Var<double>;
  using Vs = std::vector<V>;
  const std::vector<int> picks = {2, 0, 1, 2};
  return {
      {"matmul", {{4, 3}, {3, 2}}, [](Tape<double>& t, const Vs& x) { return project(t, matmul(x[0], x[1])); }},
      {"add", {{3, 4}, {3, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, add(x[0], x[1])); }},
      {"add_broadcast", {{3, 4}, {1, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, add(x[0], x[1])); }},
      {"sub_broadcast", {{3, 4}, {1, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, sub(x[0], x[1])); }},
      {"hadamard", {{3, 4}, {3, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, hadamard(x[0], x[1])); }},
      {"hadamard_broadcast", {{3, 4}, {1, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, hadamard(x[0], x[1])); }},
      {"scale", {{2, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, scale(x[0], -1.7)); }},
      {"add_scalar", {{2, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, add_scalar(x[0], 0.4)); }},
      {"relu", {{3, 5}}, [](Tape<double>& t, const Vs& x) { return project(t, relu(x[0])); }},
      {"exp", {{3, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, exp(x[0])); }},
      {"log", {{3, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, log(x[0])); }, 0.2, 2.0},
      {"square", {{3, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, square(x[0])); }},
      {"softmax", {{3, 5}}, [](Tape<double>& t, const Vs& x) { return project(t, softmax(x[0])); }},
      {"log_softmax", {{3, 5}}, [](Tape<double>& t, const Vs& x) { return project(t, log_softmax(x[0])); }},
      {"clip", {{4, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, clip(x[0], -0.5, 0.5)); }},
      {"minimum", {{4, 4}, {4, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, minimum(x[0], x[1])); }},
      {"sum", {{3, 2}}, [](Tape<double>&, const Vs& x) { return scale(sum(square(x[0])), 0.5); }},
      {"mean", {{3, 2}}, [](Tape<double>&, const Vs& x) { return mean(exp(x[0])); }},
      {"row_sum", {{3, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, row_sum(x[0])); }},
      {"pick", {{4, 3}}, [picks](Tape<double>& t, const Vs& x) { return project(t, pick(x[0], std::span<const int>(picks))); }},
      {"reshape", {{2, 6}}, [](Tape<double>& t, const Vs& x) { return project(t, reshape(x[0], 3, 4)); }},
      {"row", {{3, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, row(x[0], 1)); }},
      {"repeat_rows", {{1, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, repeat_rows(x[0], 3)); }},
      {"concat_cols", {{3, 2}, {3, 4}}, [](Tape<double>& t, const Vs& x) { return project(t, concat_cols(x[0], x[1])); }},
      {"concat_rows", {{2, 3}, {1, 3}, {3, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, concat_rows(std::span<const V>(x))); }},
      {"operators", {{2, 3}, {2, 3}}, [](Tape<double>& t, const Vs& x) { return project(t, -(x[0] + x[1]) - 2.0 * x[1]); }},
      {"modulated_mlp", {{5, 4}, {4, 6}, {1, 6}, {1, 6}, {6, 3}, {1, 3}, {1, 3}, {3, 2}, {1, 2}, {1, 2}},
       [](Tape<double>& t, const Vs& x) {
         std::array<LayerVars<double>, kPolicyLayers> layers = {
             LayerVars<double>{x[1], x[2], x[3]}, LayerVars<double>{x[4], x[5], x[6]},
             LayerVars<double>{x[7], x[8], x[9]}};
         return project(t, mlp_forward(layers, x[0]));
       }},
      {"reused_node", {{3, 3}}, [](Tape<double>& t, const Vs& x) {
         const V y = exp(x[0]);
         return project(t, hadamard(y, add(y, x[0])));
       }},
  };
}

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const OpCase c = op_cases()[GetParam()];
  Rng rng(1000 + GetParam());
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Mat> inputs;
    for (auto [r, k] : c.shapes) inputs.push_back(random_matrix(rng, r, k, c.lo, c.hi));
    EXPECT_LT(gradient_error(c.f, inputs), 1e-6) << c.name << " trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(Ops, GradientCheck,
                         ::testing::Range(0, static_cast<int>(op_cases().size())),
                         [](const ::testing::TestParamInfo<int>& info) {
                           return std::string(op_cases()[info.param].name);
                         });

TEST(Tape, ForwardValues) {
  Tape<double> tape;
  Mat a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const auto va = tape.constant(a), vb = tape.constant(b);
  EXPECT_EQ(matmul(va, vb).value(), (Mat(2, 2) << 2, 1, 4, 3).finished());
  EXPECT_DOUBLE_EQ(sum(va).scalar(), 10.0);
  EXPECT_DOUBLE_EQ(mean(va).scalar(), 2.5);
  const auto sm = softmax(va).value();
  EXPECT_NEAR(sm.row(0).sum(), 1.0, 1e-15);
  EXPECT_NEAR(sm(0, 1) / sm(0, 0), std::exp(1.0), 1e-12);
  const std::vector<int> cols = {1, 0};
  EXPECT_EQ(pick(va, std::span<const int>(cols)).value(), (Mat(2, 1) << 2, 3).finished());
  EXPECT_EQ(reshape(va, 1, 4).value(), (Mat(1, 4) << 1, 2, 3, 4).finished());
  EXPECT_EQ(clip(va, 1.5, 3.5).value(), (Mat(2, 2) << 1.5, 2, 3, 3.5).finished());
}

TEST(Tape, LogSoftmaxIsStableForLargeLogits) {
  Tape<double> tape;
  Mat z(1, 3);
  z << 1000.0, 1001.0, 999.0;
  const Mat out = log_softmax(tape.constant(z)).value();
  EXPECT_TRUE(out.allFinite());
  EXPECT_NEAR(std::exp(out(0, 0)) + std::exp(out(0, 1)) + std::exp(out(0, 2)), 1.0, 1e-12);
}

TEST(Tape, ContractViolations) {
  Tape<double> tape, other;
  const auto a = tape.constant(Mat::Ones(2, 3));
  const auto b = other.constant(Mat::Ones(3, 2));
  EXPECT_THROW(matmul(a, b), ContractError);
  EXPECT_THROW(matmul(a, tape.constant(Mat::Ones(2, 2))), DimensionError);
  EXPECT_THROW(add(a, tape.constant(Mat::Ones(3, 3))), DimensionError);
  EXPECT_THROW(tape.backward(a), ContractError);
  EXPECT_THROW(other.backward(sum(a)), ContractError);
  EXPECT_THROW(reshape(a, 4, 2), DimensionError);
}

TEST(Tape, NonFiniteValuesRaiseNumericError) {
  Tape<double> tape;
  Mat big(1, 1);
  big << 1000.0;
  EXPECT_THROW(exp(tape.constant(big)), NumericError);
  Mat zero(1, 1);
  zero << 0.0;
  EXPECT_THROW(log(tape.constant(zero)), NumericError);
}

TEST(Tape, ConstantsReceiveNoGradient) {
  Parameter<double> p("p", Mat::Constant(1, 1, 2.0));
  Tape<double> tape;
  const auto x = tape.parameter(p);
  const auto c = tape.constant(Mat::Constant(1, 1, 3.0));
  tape.backward(sum(hadamard(x, c)));
  EXPECT_DOUBLE_EQ(p.grad(0, 0), 3.0);
  EXPECT_THROW(c.grad(), ContractError);
}

TEST(Tape, ParameterGradientsAccumulateAcrossTapes) {
  Parameter<double> p("p", Mat::Constant(1, 2, 1.5));
  for (int i = 0; i < 2; ++i) {
    Tape<double> tape;
    tape.backward(sum(square(tape.parameter(p))));
  }
  EXPECT_DOUBLE_EQ(p.grad(0, 0), 6.0);
  ParameterStore<double> store;
  store.add("a", Mat::Ones(2, 2)).grad.setConstant(1.0);
  store.add("b", Mat::Ones(1, 3));
  EXPECT_EQ(store.parameter_count(), 7);
  store.zero_grad();
  EXPECT_EQ(store[0].grad.sum(), 0.0);
}

// Reference Adam written out step by step.
TEST(Adam, MatchesReferenceRecursion) {
  Rng rng(5);
  const AdamConfig config{0.01, 0.8, 0.95, 1e-6};
  Mat value = random_matrix(rng, 2, 3), m = Mat::Zero(2, 3), v = Mat::Zero(2, 3);
  Mat ref = value;
  std::vector<double> rm(6, 0.0), rv(6, 0.0);
  for (long long step = 1; step <= 6; ++step) {
    Mat grad = random_matrix(rng, 2, 3);
    for (int i = 0; i < 6; ++i) {
      const double g = grad.data()[i];
      rm[i] = 0.8 * rm[i] + 0.2 * g;
      rv[i] = 0.95 * rv[i] + 0.05 * g * g;
      const double mhat = rm[i] / (1.0 - std::pow(0.8, step));
      const double vhat = rv[i] / (1.0 - std::pow(0.95, step));
      ref.data()[i] -= 0.01 * mhat / (std::sqrt(vhat) + 1e-6);
    }
    adam_update(value, grad, m, v, config, step, true);
    EXPECT_EQ(grad.squaredNorm(), 0.0);
  }
  EXPECT_LT((value - ref).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParameterStore<double> store;
  auto& p = store.add("p", (Mat(1, 3) << 1.0, -2.0, 0.5).finished());
  p.grad << 4.0, -0.001, 0.0;
  Adam<double> adam(store, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  adam.step();
  EXPECT_NEAR(p.value(0, 0), 0.9, 1e-7);
  EXPECT_NEAR(p.value(0, 1), -1.9, 1e-4);
  EXPECT_DOUBLE_EQ(p.value(0, 2), 0.5);
  EXPECT_EQ(adam.steps(), 1);
  Mat bad = Mat::Zero(1, 2);
  EXPECT_THROW(adam_update(p.value, bad, bad, bad, AdamConfig{}, 1), DimensionError);
}

TEST(Layers, ModulatedLayerMatchesDefinition) {
  Rng rng(9);
  ParamSet<double> params;
  const int widths[] = {4, 5, 3, 2};
  for (int l = 0; l < kPolicyLayers; ++l) {
    params.layers[l] = {random_matrix(rng, widths[l], widths[l + 1]),
                        random_matrix(rng, 1, widths[l + 1]),
                        random_matrix(rng, 1, widths[l + 1])};
  }
  params.validate();
  const Mat x = random_matrix(rng, 6, 4);
  Mat h = x;
  for (int l = 0; l < kPolicyLayers; ++l) {
    const auto& p = params.layers[l];
    Mat next(h.rows(), p.out_dim());
    for (Index r = 0; r < h.rows(); ++r) {
      for (Index j = 0; j < p.out_dim(); ++j) {
        double acc = 0.0;
        for (Index i = 0; i < h.cols(); ++i) acc += h(r, i) * p.w(i, j);
        double y = acc * (1.0 + p.g(0, j)) + p.b(0, j);
        if (l + 1 < kPolicyLayers) y = std::max(y, 0.0);
        next(r, j) = y;
      }
    }
    h = next;
  }
  EXPECT_LT((mlp_forward(params, x) - h).cwiseAbs().maxCoeff(), 1e-12);
  const auto taps = mlp_forward_taps(views(params), x);
  EXPECT_EQ(taps[2], mlp_forward(params, x));
  EXPECT_GE(taps[0].minCoeff(), 0.0);

  // Zero scaling factors reduce to an ordinary affine layer.
  params.layers[0].g.setZero();
  const Mat plain = (x * params.layers[0].w).rowwise() + params.layers[0].b.row(0);
  EXPECT_LT((modulated_affine(x, views(params)[0]) - plain).cwiseAbs().maxCoeff(), 1e-12);

  params.layers[1].b = Mat::Zero(1, 4);
  EXPECT_THROW(params.validate(), DimensionError);
  const Mat narrow = Mat::Ones(2, 3);
  EXPECT_THROW(modulated_affine(narrow, views(params)[0]), DimensionError);
}

}  // namespace
}  // namespace papo
