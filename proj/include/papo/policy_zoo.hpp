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

// Actor-critic architectures conditioned (or not) on the population size N.
//
//   PPO, PPO-Large        policy(obs)
//   AugPPO, AugPPO-Large  policy(obs ++ emb(N))
//   HyperPPO              policy_{h(emb(N))}(obs)
//   PAPO                  policy_{h(emb(N))}(obs ++ emb(N))
//
// emb is a linear embedding of the population encoding. h is a hypernetwork:
// a two-layer ReLU trunk followed by one head per policy layer, each head
// holding three linear maps that emit the layer's weights, biases and
// scaling factors. Actor and critic are separate networks with separate
// embeddings and hypernetworks.

#ifndef PAPO_POLICY_ZOO_HPP_
#define PAPO_POLICY_ZOO_HPP_

#include <array>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "papo/autodiff.hpp"
#include "papo/checkpoint.hpp"
#include "papo/envs.hpp"
#include "papo/layers.hpp"
#include "papo/pop_encoding.hpp"
#include "papo/types.hpp"

namespace papo {

enum class ArchitectureKind { kPPO, kPPOLarge, kAugPPO, kAugPPOLarge, kHyperPPO, kPAPO };

inline constexpr std::array<ArchitectureKind, 6> kAllArchitectures = {
    ArchitectureKind::kPPO,         ArchitectureKind::kPPOLarge,
    ArchitectureKind::kAugPPO,      ArchitectureKind::kAugPPOLarge,
    ArchitectureKind::kHyperPPO,    ArchitectureKind::kPAPO};

std::string to_string(ArchitectureKind kind);
ArchitectureKind parse_architecture_kind(const std::string& name);
bool is_hyper(ArchitectureKind kind);
bool is_population_aware(ArchitectureKind kind);

// Shapes of one network (actor or critic).
struct NetworkLayout {
  int observation_width = 0;
  int output_width = 0;
  bool augment = false;  // embedding appended to the policy input
  bool hyper = false;    // policy parameters emitted by a hypernetwork
  EncodingKind encoding = EncodingKind::kBinary;
  int encoding_bits = 12;
  int embedding_width = 128;
  std::array<int, 2> hidden = {128, 128};
  std::array<int, 2> trunk = {128, 128};

  bool embedded() const { return augment || hyper; }
  int feature_width() const {
    return population_feature_width(encoding, encoding_bits);
  }
  int policy_input_width() const {
    return observation_width + (augment ? embedding_width : 0);
  }
  // (in, out) of each policy layer.
  std::array<std::pair<int, int>, kPolicyLayers> layer_shapes() const;
  long long parameter_count() const;
};

struct ModelOptions {
  EncodingKind encoding = EncodingKind::kBinary;
  int encoding_bits = 12;
  int embedding_width = 128;
  std::array<int, 2> hidden = {128, 128};
  // PAPO hypernetwork trunk; {0, 0} selects the per-environment default.
  std::array<int, 2> trunk = {0, 0};
  // Hypernetwork head weights start at this fraction of the fan-in scale.
  double head_init_scale = 0.01;
  // Output layers (logits/value) start at this fraction of the fan-in scale.
  double output_init_scale = 0.01;
  // Allowed relative deviation of sized baselines from PAPO's count.
  double parity_tolerance = 0.05;
};

std::array<int, 2> default_trunk(EnvKind env);

struct ArchitectureSpec {
  ArchitectureKind kind = ArchitectureKind::kPPO;
  NetworkLayout actor;
  NetworkLayout critic;

  long long parameter_count() const {
    return actor.parameter_count() + critic.parameter_count();
  }
};

// Resolves layer widths. PPO-Large and AugPPO-Large widen the policy hidden
// layers and HyperPPO widens the second trunk layer until the total count
// matches PAPO's for the same environment.
ArchitectureSpec resolve_architecture(ArchitectureKind kind,
                                      const GameConfig& game,
                                      const ModelOptions& options);

// Contiguous rows of a batch that share one population size.
struct PopulationGroup {
  int population = 0;
  Index begin = 0;
  Index count = 0;
};

// A network with its parameters fixed for one population size.
template <typename Scalar>
class BoundNetwork {
 public:
  BoundNetwork(std::shared_ptr<const ParamSet<Scalar>> owned,
               LayerViews<Scalar> views, Matrix<Scalar> embedding, bool augment)
      : owned_(std::move(owned)),
        views_(views),
        embedding_(std::move(embedding)),
        augment_(augment) {}

  Matrix<Scalar> input(const Matrix<Scalar>& obs) const;
  Matrix<Scalar> forward(const Matrix<Scalar>& obs) const {
    return mlp_forward(views_, input(obs));
  }
  LayerTaps<Scalar> taps(const Matrix<Scalar>& obs) const {
    return mlp_forward_taps(views_, input(obs));
  }
  const LayerViews<Scalar>& layers() const { return views_; }

 private:
  std::shared_ptr<const ParamSet<Scalar>> owned_;
  LayerViews<Scalar> views_;
  Matrix<Scalar> embedding_;
  bool augment_;
};

template <typename Scalar>
class PolicyNetwork {
 public:
  PolicyNetwork(const NetworkLayout& layout, ParameterStore<Scalar>& store,
                const std::string& prefix, const ModelOptions& options, Rng& rng);

  const NetworkLayout& layout() const { return layout_; }

  // 1 x embedding_width embedding of N.
  Matrix<Scalar> embedding(int population) const;
  // Policy parameters in effect for N (a copy for direct networks).
  ParamSet<Scalar> generate(int population) const;
  // Hypernetwork output for a given embedding row.
  ParamSet<Scalar> generate_from_embedding(const Matrix<Scalar>& embedding) const;

  BoundNetwork<Scalar> bind(int population) const;
  Matrix<Scalar> forward(const Matrix<Scalar>& obs, int population) const {
    return bind(population).forward(obs);
  }

  // Differentiable forward pass. Rows of `obs` must be grouped by population
  // as described by `groups`; output rows follow the same order.
  Var<Scalar> forward(Tape<Scalar>& tape, const Matrix<Scalar>& obs,
                      std::span<const PopulationGroup> groups) const;

  // Hypernetwork trunk output for one population (hyper layouts only).
  Matrix<Scalar> trunk_output(int population) const;

 private:
  Parameter<Scalar>& make(ParameterStore<Scalar>& store, const std::string& name,
                          Matrix<Scalar> value);

  NetworkLayout layout_;
  Parameter<Scalar>* embedding_w_ = nullptr;
  Parameter<Scalar>* embedding_b_ = nullptr;
  // Direct policy parameters: [layer][w, b, g].
  std::array<std::array<Parameter<Scalar>*, 3>, kPolicyLayers> direct_{};
  std::array<Parameter<Scalar>*, 2> trunk_w_{};
  std::array<Parameter<Scalar>*, 2> trunk_b_{};
  // Heads: [layer][w, b, g] linear maps from the trunk output.
  std::array<std::array<Parameter<Scalar>*, 3>, kPolicyLayers> head_w_{};
  std::array<std::array<Parameter<Scalar>*, 3>, kPolicyLayers> head_b_{};
};

struct ActResult {
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
};

template <typename Scalar>
class ActorCritic {
 public:
  static ActorCritic build(ArchitectureKind kind, const GameConfig& game,
                           const ModelOptions& options, std::uint64_t seed);
  static ActorCritic from_spec(const ArchitectureSpec& spec,
                               const ModelOptions& options, std::uint64_t seed);
  static ActorCritic from_checkpoint(const Checkpoint& checkpoint);

  ActorCritic(ActorCritic&&) noexcept = default;
  ActorCritic& operator=(ActorCritic&&) noexcept = default;

  const ArchitectureSpec& spec() const { return spec_; }
  ArchitectureKind kind() const { return spec_.kind; }
  const PolicyNetwork<Scalar>& actor() const { return *actor_; }
  const PolicyNetwork<Scalar>& critic() const { return *critic_; }
  ParameterStore<Scalar>& actor_parameters() { return *actor_store_; }
  ParameterStore<Scalar>& critic_parameters() { return *critic_store_; }
  const ParameterStore<Scalar>& actor_parameters() const { return *actor_store_; }
  const ParameterStore<Scalar>& critic_parameters() const { return *critic_store_; }
  Index parameter_count() const {
    return actor_store_->parameter_count() + critic_store_->parameter_count();
  }

  ActorCritic clone() const;

  // Architecture descriptor plus every parameter as float32.
  Checkpoint to_checkpoint() const;
  void load_parameters(const Checkpoint& checkpoint);
  // FNV-1a over all parameter bytes.
  std::uint64_t checksum() const;

  // Samples an action for one observation at population N.
  ActResult act(const Vector<Scalar>& obs, int population, Rng& rng) const;

 private:
  ActorCritic() = default;

  ArchitectureSpec spec_;
  ModelOptions options_;
  std::unique_ptr<ParameterStore<Scalar>> actor_store_;
  std::unique_ptr<ParameterStore<Scalar>> critic_store_;
  std::unique_ptr<PolicyNetwork<Scalar>> actor_;
  std::unique_ptr<PolicyNetwork<Scalar>> critic_;
};

// Inverse-CDF draw from a probability row.
int sample_categorical(const double* probs, int n, Rng& rng);

void write_model_options(const ModelOptions& options, KeyValueConfig& config);
ModelOptions model_options_from(const KeyValueConfig& config);

extern template class PolicyNetwork<float>;
extern template class PolicyNetwork<double>;
extern template class ActorCritic<float>;
extern template class ActorCritic<double>;

}  // namespace papo

#endif  // PAPO_POLICY_ZOO_HPP_
