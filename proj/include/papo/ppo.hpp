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

// Multi-task PPO over a set of population sizes.
//
// Each episode samples N uniformly from the game set, lets all N agents act
// under the current policy and stores agent 0's transitions. Every E episodes
// the buffer is turned into a batch (truncated GAE per episode) and K full-batch
// epochs of Adam minimize
//
//   loss = -(L1 - c1 * L2 + c2 * H)
//
// where L1 is the clipped surrogate, L2 the squared value error and H the
// policy entropy. Actor and critic have separate optimizers.

#ifndef PAPO_PPO_HPP_
#define PAPO_PPO_HPP_

#include <functional>
#include <span>
#include <vector>

#include "papo/adam.hpp"
#include "papo/checkpoint.hpp"
#include "papo/config_file.hpp"
#include "papo/envs.hpp"
#include "papo/policy.hpp"
#include "papo/policy_zoo.hpp"
#include "papo/rollout.hpp"
#include "papo/types.hpp"

namespace papo {

struct TrainConfig {
  std::vector<int> game_set;  // empty: every N in [n_min, n_max]
  int n_min = 2;
  int n_max = 200;
  long long episodes = 20000000;
  int update_every = 5;  // E
  int epochs = 5;        // K
  double clip = 0.2;
  double actor_lr = 3e-5;
  double critic_lr = 3e-4;
  double c1 = 0.5;
  double c2 = 0.01;
  double gamma = 0.99;
  double lambda = 0.95;
  bool normalize_advantages = true;
  bool undiscounted_value_target = false;
  std::uint64_t seed = 0;

  std::vector<int> populations() const;
  void validate() const;
};

// Reads the [train] section.
TrainConfig train_config_from(const KeyValueConfig& config);
void write_train_config(const TrainConfig& train, KeyValueConfig& config);

struct Transition {
  int cell = 0;
  int t = 0;
  int action = 0;
  double reward = 0.0;
  int next_cell = 0;
  double log_prob_old = 0.0;
  double value_old = 0.0;
  int population = 0;
  long long episode = 0;
};

// A = delta_t + (gamma lambda) delta_{t+1} + ..., delta_t = r_t + gamma V_{t+1}
// - V_t. `values` has one more entry than `rewards` (the terminal bootstrap).
std::vector<double> compute_gae(std::span<const double> rewards,
                                std::span<const double> values, double gamma,
                                double lambda);

// sum_{t' >= t} gamma^(t' - t) r_t'.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

struct TransitionBatch {
  std::vector<Transition> transitions;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<PopulationGroup> groups;

  std::size_t size() const { return transitions.size(); }

  // Computes advantages and value targets episode by episode (transitions of
  // one episode must be contiguous and ordered in t) and the population groups.
  void finalize(const TrainConfig& config);

  template <typename Scalar>
  Matrix<Scalar> observations(const Game& game) const;
};

struct LossTerms {
  double surrogate = 0.0;    // L1
  double value_error = 0.0;  // L2
  double entropy = 0.0;      // H
};

template <typename Scalar>
struct PpoLoss {
  Var<Scalar> loss;
  LossTerms terms;
};

// Records the loss on `tape`. Throws TrainingFault when any term is not finite.
template <typename Scalar>
PpoLoss<Scalar> ppo_loss(Tape<Scalar>& tape, const ActorCritic<Scalar>& model,
                         const Game& game, const TransitionBatch& batch,
                         const TrainConfig& config);

struct EpisodeLog {
  long long episode = 0;
  int population = 0;
  double ret = 0.0;
  bool has_loss = false;
  double surrogate = 0.0;
  double value_error = 0.0;
  double entropy = 0.0;
};

template <typename Scalar>
class Trainer {
 public:
  // Self-play when `opponents` is null; otherwise agent 0 learns a best
  // response while agents 1..N-1 follow the fixed table.
  Trainer(const Game& game, ActorCritic<Scalar>& model, TrainConfig config,
          ActionSource* opponents = nullptr);

  // Plays episodes until `config.episodes` have been completed or `limit`
  // more have run. Updates happen after every E-th episode.
  void run(long long limit = -1,
           const std::function<void(const EpisodeLog&)>& on_episode = {});

  long long episode() const { return episode_; }
  long long updates() const { return updates_; }
  bool finished() const { return episode_ >= config_.episodes; }
  const TrainConfig& config() const { return config_; }
  ActorCritic<Scalar>& model() { return *model_; }

  // Finalizes `batch` and runs K epochs on it. Returns the loss terms of the
  // first epoch, evaluated at the collection-time parameters.
  LossTerms update(TransitionBatch& batch);

  // Drops transitions collected since the last update.
  void discard_buffer() { buffer_ = TransitionBatch(); }

  // Optimizer moments, step counts, rng and episode counter. Only valid at an
  // update boundary (empty buffer).
  Checkpoint save_state() const;
  void restore_state(const Checkpoint& state);

 private:
  void play_episode();

  const Game& game_;
  ActorCritic<Scalar>* model_;
  TrainConfig config_;
  ActionSource* opponents_;
  std::vector<int> populations_;
  Adam<Scalar> actor_adam_;
  Adam<Scalar> critic_adam_;
  Rng rng_;
  long long episode_ = 0;
  long long updates_ = 0;
  TransitionBatch buffer_;
  EpisodeLog last_;
  EpisodeTrace trace_;
  std::vector<double> rewards_scratch_;
};

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace papo

#endif  // PAPO_PPO_HPP_
