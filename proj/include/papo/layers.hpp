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

// Three-layer modulated MLP. Each layer computes
//
//   x' = act((x w) .* (1 + g) + b)
//
// with ReLU after the first two layers and no activation after the last.
// With g = 0 this is an ordinary MLP.

#ifndef PAPO_LAYERS_HPP_
#define PAPO_LAYERS_HPP_

#include <array>

#include "papo/autodiff.hpp"
#include "papo/errors.hpp"
#include "papo/types.hpp"

namespace papo {

inline constexpr int kPolicyLayers = 3;

template <typename Scalar>
struct LayerParams {
  Matrix<Scalar> w;  // in x out
  Matrix<Scalar> b;  // 1 x out
  Matrix<Scalar> g;  // 1 x out, scaling factors

  Index in_dim() const { return w.rows(); }
  Index out_dim() const { return w.cols(); }
  Index size() const { return w.size() + b.size() + g.size(); }

  static LayerParams zeros(Index in, Index out) {
    return {Matrix<Scalar>::Zero(in, out), Matrix<Scalar>::Zero(1, out),
            Matrix<Scalar>::Zero(1, out)};
  }
};

template <typename Scalar>
struct ParamSet {
  std::array<LayerParams<Scalar>, kPolicyLayers> layers;

  Index size() const {
    Index total = 0;
    for (const auto& l : layers) total += l.size();
    return total;
  }

  void validate() const {
    for (int l = 0; l < kPolicyLayers; ++l) {
      const auto& layer = layers[l];
      if (layer.b.rows() != 1 || layer.g.rows() != 1 ||
          layer.b.cols() != layer.out_dim() || layer.g.cols() != layer.out_dim()) {
        throw DimensionError("layer " + std::to_string(l) +
                             ": bias/scale shape does not match weights");
      }
      if (l + 1 < kPolicyLayers && layer.out_dim() != layers[l + 1].in_dim()) {
        throw DimensionError("layer " + std::to_string(l) +
                             " output width differs from next layer input");
      }
    }
  }

  template <typename Other>
  ParamSet<Other> cast() const {
    ParamSet<Other> out;
    for (int l = 0; l < kPolicyLayers; ++l) {
      out.layers[l].w = layers[l].w.template cast<Other>();
      out.layers[l].b = layers[l].b.template cast<Other>();
      out.layers[l].g = layers[l].g.template cast<Other>();
    }
    return out;
  }
};

// Non-owning view of one layer; lets stored parameters be evaluated without
// copying them into a ParamSet.
template <typename Scalar>
struct LayerView {
  const Matrix<Scalar>* w;
  const Matrix<Scalar>* b;
  const Matrix<Scalar>* g;
};

template <typename Scalar>
using LayerViews = std::array<LayerView<Scalar>, kPolicyLayers>;

template <typename Scalar>
LayerViews<Scalar> views(const ParamSet<Scalar>& params) {
  LayerViews<Scalar> out;
  for (int l = 0; l < kPolicyLayers; ++l) {
    out[l] = {&params.layers[l].w, &params.layers[l].b, &params.layers[l].g};
  }
  return out;
}

// Pre-activation of one modulated layer.
template <typename Scalar>
Matrix<Scalar> modulated_affine(const Matrix<Scalar>& x,
                                const LayerView<Scalar>& layer) {
  if (x.cols() != layer.w->rows()) {
    throw DimensionError("layer expects input width " +
                         std::to_string(layer.w->rows()) + ", got " +
                         std::to_string(x.cols()));
  }
  Matrix<Scalar> pre = x * *layer.w;
  pre.array().rowwise() *= layer.g->row(0).array() + Scalar(1);
  pre.rowwise() += layer.b->row(0);
  return pre;
}

// Layer outputs: two post-ReLU hidden representations and the final output.
template <typename Scalar>
using LayerTaps = std::array<Matrix<Scalar>, kPolicyLayers>;

template <typename Scalar>
LayerTaps<Scalar> mlp_forward_taps(const LayerViews<Scalar>& layers,
                                   const Matrix<Scalar>& input) {
  LayerTaps<Scalar> taps;
  taps[0] = modulated_affine(input, layers[0]).cwiseMax(Scalar(0));
  taps[1] = modulated_affine(taps[0], layers[1]).cwiseMax(Scalar(0));
  taps[2] = modulated_affine(taps[1], layers[2]);
  return taps;
}

template <typename Scalar>
Matrix<Scalar> mlp_forward(const LayerViews<Scalar>& layers,
                           const Matrix<Scalar>& input) {
  Matrix<Scalar> h = modulated_affine(input, layers[0]).cwiseMax(Scalar(0));
  h = modulated_affine(h, layers[1]).cwiseMax(Scalar(0));
  return modulated_affine(h, layers[2]);
}

template <typename Scalar>
Matrix<Scalar> mlp_forward(const ParamSet<Scalar>& params,
                           const Matrix<Scalar>& input) {
  return mlp_forward(views(params), input);
}

// Differentiable counterpart; w, b, g may be leaves or generated variables.
template <typename Scalar>
struct LayerVars {
  Var<Scalar> w;
  Var<Scalar> b;
  Var<Scalar> g;
};

template <typename Scalar>
Var<Scalar> modulated_affine(const Var<Scalar>& x, const LayerVars<Scalar>& layer) {
  return add(hadamard(matmul(x, layer.w), add_scalar(layer.g, Scalar(1))),
             layer.b);
}

template <typename Scalar>
Var<Scalar> mlp_forward(const std::array<LayerVars<Scalar>, kPolicyLayers>& layers,
                        const Var<Scalar>& input) {
  Var<Scalar> h = relu(modulated_affine(input, layers[0]));
  h = relu(modulated_affine(h, layers[1]));
  return modulated_affine(h, layers[2]);
}

}  // namespace papo

#endif  // PAPO_LAYERS_HPP_
