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

#ifndef PAPO_ADAM_HPP_
#define PAPO_ADAM_HPP_

#include <cmath>
#include <vector>

#include "papo/autodiff.hpp"
#include "papo/errors.hpp"

namespace papo {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of `value` in place. `step` counts from 1.
// Fused into a single pass; clears `grad` when `clear_grad` is set.
template <typename Scalar>
void adam_update(Matrix<Scalar>& value, Matrix<Scalar>& grad, Matrix<Scalar>& m,
                 Matrix<Scalar>& v, const AdamConfig& config, long long step,
                 bool clear_grad = false) {
  if (value.size() != grad.size() || value.size() != m.size() ||
      value.size() != v.size()) {
    throw DimensionError("adam_update: shape mismatch");
  }
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
  const Scalar b1 = static_cast<Scalar>(config.beta1);
  const Scalar b2 = static_cast<Scalar>(config.beta2);
  const Scalar one_b1 = static_cast<Scalar>(1.0 - config.beta1);
  const Scalar one_b2 = static_cast<Scalar>(1.0 - config.beta2);
  const Scalar step_size = static_cast<Scalar>(config.lr / c1);
  const Scalar inv_sqrt_c2 = static_cast<Scalar>(1.0 / std::sqrt(c2));
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  Scalar* p = value.data();
  Scalar* g = grad.data();
  Scalar* mm = m.data();
  Scalar* vv = v.data();
  const Index n = value.size();
  for (Index i = 0; i < n; ++i) {
    const Scalar gi = g[i];
    mm[i] = b1 * mm[i] + one_b1 * gi;
    vv[i] = b2 * vv[i] + one_b2 * gi * gi;
    p[i] -= step_size * mm[i] / (std::sqrt(vv[i]) * inv_sqrt_c2 + eps);
    if (clear_grad) g[i] = Scalar(0);
  }
}

// Adam over every parameter of a store.
template <typename Scalar>
class Adam {
 public:
  Adam(ParameterStore<Scalar>& store, AdamConfig config)
      : store_(&store), config_(config) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      const auto& p = store[i];
      m_.push_back(Matrix<Scalar>::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix<Scalar>::Zero(p.value.rows(), p.value.cols()));
    }
  }

  // Applies the accumulated gradients and clears them.
  void step() {
    ++steps_;
    for (std::size_t i = 0; i < store_->size(); ++i) {
      auto& p = (*store_)[i];
      adam_update(p.value, p.grad, m_[i], v_[i], config_, steps_, true);
    }
  }

  long long steps() const { return steps_; }
  void set_steps(long long steps) { steps_ = steps; }
  const AdamConfig& config() const { return config_; }
  std::vector<Matrix<Scalar>>& first_moments() { return m_; }
  std::vector<Matrix<Scalar>>& second_moments() { return v_; }
  const std::vector<Matrix<Scalar>>& first_moments() const { return m_; }
  const std::vector<Matrix<Scalar>>& second_moments() const { return v_; }

 private:
  ParameterStore<Scalar>* store_;
  AdamConfig config_;
  long long steps_ = 0;
  std::vector<Matrix<Scalar>> m_;
  std::vector<Matrix<Scalar>> v_;
};

}  // namespace papo

#endif  // PAPO_ADAM_HPP_
