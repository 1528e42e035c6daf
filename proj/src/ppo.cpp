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

#include "papo/ppo.hpp"

#include <cmath>
#include <sstream>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include "papo/errors.hpp"

namespace papo {

namespace {

// Flushes subnormal floats to zero while alive.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

}  // namespace

std::vector<int> TrainConfig::populations() const {
  if (!game_set.empty()) return game_set;
  std::vector<int> out;
  for (int n = n_min; n <= n_max; ++n) out.push_back(n);
  return out;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("train: " + msg); };
  if (game_set.empty() && (n_min < 1 || n_max < n_min)) {
    fail("need 1 <= n_min <= n_max");
  }
  for (int n : game_set) {
    if (n < 1) fail("population sizes must be positive");
  }
  if (episodes < 1) fail("episodes must be positive");
  if (update_every < 1 || epochs < 1) fail("update_every and epochs must be positive");
  if (!(clip > 0.0 && clip < 1.0)) fail("clip must lie in (0, 1)");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) fail("learning rates must be positive");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) fail("loss coefficients must be non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0) || !(lambda > 0.0 && lambda <= 1.0)) {
    fail("gamma and lambda must lie in (0, 1]");
  }
}

TrainConfig train_config_from(const KeyValueConfig& config) {
  TrainConfig c;
  c.game_set = config.get_int_list("train.game_set", {});
  c.n_min = static_cast<int>(config.get_int("train.n_min", c.n_min));
  c.n_max = static_cast<int>(config.get_int("train.n_max", c.n_max));
  c.episodes = config.get_int("train.episodes", c.episodes);
  c.update_every = static_cast<int>(config.get_int("train.update_every", c.update_every));
  c.epochs = static_cast<int>(config.get_int("train.epochs", c.epochs));
  c.clip = config.get_double("train.clip", c.clip);
  c.actor_lr = config.get_double("train.actor_lr", c.actor_lr);
  c.critic_lr = config.get_double("train.critic_lr", c.critic_lr);
  c.c1 = config.get_double("train.c1", c.c1);
  c.c2 = config.get_double("train.c2", c.c2);
  c.gamma = config.get_double("train.gamma", c.gamma);
  c.lambda = config.get_double("train.lambda", c.lambda);
  c.normalize_advantages =
      config.get_bool("train.normalize_advantages", c.normalize_advantages);
  c.undiscounted_value_target =
      config.get_bool("train.undiscounted_value_target", c.undiscounted_value_target);
  c.seed = static_cast<std::uint64_t>(config.get_int("train.seed", 0));
  c.validate();
  return c;
}

void write_train_config(const TrainConfig& c, KeyValueConfig& config) {
  if (!c.game_set.empty()) config.set("train.game_set", format_int_list(c.game_set));
  config.set("train.n_min", std::to_string(c.n_min));
  config.set("train.n_max", std::to_string(c.n_max));
  config.set("train.episodes", std::to_string(c.episodes));
  config.set("train.update_every", std::to_string(c.update_every));
  config.set("train.epochs", std::to_string(c.epochs));
  config.set("train.clip", format_double(c.clip));
  config.set("train.actor_lr", format_double(c.actor_lr));
  config.set("train.critic_lr", format_double(c.critic_lr));
  config.set("train.c1", format_double(c.c1));
  config.set("train.c2", format_double(c.c2));
  config.set("train.gamma", format_double(c.gamma));
  config.set("train.lambda", format_double(c.lambda));
  config.set("train.normalize_advantages", c.normalize_advantages ? "true" : "false");
  config.set("train.undiscounted_value_target",
             c.undiscounted_value_target ? "true" : "false");
  config.set("train.seed", std::to_string(c.seed));
}

std::vector<double> compute_gae(std::span<const double> rewards,
                                std::span<const double> values, double gamma,
                                double lambda) {
  if (values.size() != rewards.size() + 1) {
    throw ContractError("compute_gae: need one value per reward plus the terminal value");
  }
  std::vector<double> adv(rewards.size());
  double next = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    const double delta = rewards[i] + gamma * values[i + 1] - values[i];
    next = delta + gamma * lambda * next;
    adv[i] = next;
  }
  return adv;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double next = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    next = rewards[i] + gamma * next;
    out[i] = next;
  }
  return out;
}

void TransitionBatch::finalize(const TrainConfig& config) {
  if (transitions.empty()) throw ContractError("empty transition batch");
  advantages.assign(transitions.size(), 0.0);
  returns.assign(transitions.size(), 0.0);
  groups.clear();
  std::vector<double> r, v;
  std::size_t begin = 0;
  while (begin < transitions.size()) {
    std::size_t end = begin;
    while (end < transitions.size() &&
           transitions[end].episode == transitions[begin].episode) {
      if (transitions[end].t != transitions[begin].t + static_cast<int>(end - begin)) {
        throw ContractError("episode transitions are not ordered in t");
      }
      ++end;
    }
    r.clear();
    v.clear();
    for (std::size_t i = begin; i < end; ++i) {
      r.push_back(transitions[i].reward);
      v.push_back(transitions[i].value_old);
    }
    v.push_back(0.0);
    const std::vector<double> a = compute_gae(r, v, config.gamma, config.lambda);
    const std::vector<double> g =
        discounted_returns(r, config.undiscounted_value_target ? 1.0 : config.gamma);
    for (std::size_t i = begin; i < end; ++i) {
      advantages[i] = a[i - begin];
      returns[i] = g[i - begin];
    }
    const int n = transitions[begin].population;
    if (!groups.empty() && groups.back().population == n) {
      groups.back().count += static_cast<Index>(end - begin);
    } else {
      groups.push_back({n, static_cast<Index>(begin), static_cast<Index>(end - begin)});
    }
    begin = end;
  }
  if (config.normalize_advantages && advantages.size() > 1) {
    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= advantages.size();
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / advantages.size());
    for (double& a : advantages) a = (a - mean) / (sd + 1e-8);
  }
}

template <typename Scalar>
Matrix<Scalar> TransitionBatch::observations(const Game& game) const {
  Matrix<Scalar> obs(static_cast<Index>(transitions.size()), game.observation_width());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    game.write_observation(AgentState{transitions[i].cell, transitions[i].t},
                           obs.row(static_cast<Index>(i)));
  }
  return obs;
}

template Matrix<float> TransitionBatch::observations<float>(const Game&) const;
template Matrix<double> TransitionBatch::observations<double>(const Game&) const;

template <typename Scalar>
PpoLoss<Scalar> ppo_loss(Tape<Scalar>& tape, const ActorCritic<Scalar>& model,
                         const Game& game, const TransitionBatch& batch,
                         const TrainConfig& config) {
  const Index n = static_cast<Index>(batch.size());
  if (n == 0) throw ContractError("ppo_loss: empty batch");
  if (batch.advantages.size() != batch.size() || batch.groups.empty()) {
    throw ContractError("ppo_loss: batch is not finalized");
  }
  Matrix<Scalar> old_logp(n, 1), adv(n, 1), target(n, 1);
  std::vector<int> actions(n);
  for (Index i = 0; i < n; ++i) {
    const Transition& tr = batch.transitions[i];
    old_logp(i, 0) = static_cast<Scalar>(tr.log_prob_old);
    adv(i, 0) = static_cast<Scalar>(batch.advantages[i]);
    target(i, 0) = static_cast<Scalar>(batch.returns[i]);
    actions[i] = tr.action;
  }
  try {
    const Matrix<Scalar> obs = batch.observations<Scalar>(game);
    const Var<Scalar> logits = model.actor().forward(tape, obs, batch.groups);
    const Var<Scalar> logp_all = log_softmax(logits);
    const Var<Scalar> logp = pick(logp_all, std::span<const int>(actions));
    const Var<Scalar> ratio = exp(sub(logp, tape.constant(old_logp)));
    const Var<Scalar> a = tape.constant(adv);
    const Scalar eps = static_cast<Scalar>(config.clip);
    const Var<Scalar> surrogate =
        mean(minimum(hadamard(ratio, a),
                     hadamard(clip(ratio, Scalar(1) - eps, Scalar(1) + eps), a)));

    const Var<Scalar> values = model.critic().forward(tape, obs, batch.groups);
    const Var<Scalar> value_error = mean(square(sub(values, tape.constant(target))));

    const Var<Scalar> entropy =
        scale(sum(hadamard(exp(logp_all), logp_all)), Scalar(-1) / Scalar(n));

    PpoLoss<Scalar> out;
    out.loss = sub(sub(scale(value_error, static_cast<Scalar>(config.c1)), surrogate),
                   scale(entropy, static_cast<Scalar>(config.c2)));
    out.terms.surrogate = static_cast<double>(surrogate.scalar());
    out.terms.value_error = static_cast<double>(value_error.scalar());
    out.terms.entropy = static_cast<double>(entropy.scalar());
    return out;
  } catch (const NumericError& e) {
    std::ostringstream msg;
    msg << "PPO loss diverged on a batch of " << n << " transitions ("
        << batch.groups.size() << " population groups): " << e.what();
    throw TrainingFault(msg.str());
  }
}

template PpoLoss<float> ppo_loss<float>(Tape<float>&, const ActorCritic<float>&,
                                        const Game&, const TransitionBatch&,
                                        const TrainConfig&);
template PpoLoss<double> ppo_loss<double>(Tape<double>&, const ActorCritic<double>&,
                                          const Game&, const TransitionBatch&,
                                          const TrainConfig&);

template <typename Scalar>
Trainer<Scalar>::Trainer(const Game& game, ActorCritic<Scalar>& model,
                         TrainConfig config, ActionSource* opponents)
    : game_(game),
      model_(&model),
      config_(std::move(config)),
      opponents_(opponents),
      populations_(config_.populations()),
      actor_adam_(model.actor_parameters(), AdamConfig{config_.actor_lr}),
      critic_adam_(model.critic_parameters(), AdamConfig{config_.critic_lr}),
      rng_(derive_seed(config_.seed, 0x7472)) {
  config_.validate();
}

template <typename Scalar>
void Trainer<Scalar>::play_episode() {
  const int n = populations_[uniform_int(rng_, populations_.size())];
  LazyNetworkPolicy<Scalar> policy(game_, model_->actor().bind(n));
  ActionSource& others = opponents_ ? *opponents_ : policy;
  const double ret = run_episode(game_, n, policy, others, rng_, &trace_);

  const int horizon = game_.horizon();
  Matrix<Scalar> obs(horizon, game_.observation_width());
  for (int t = 0; t < horizon; ++t) {
    game_.write_observation(AgentState{trace_.cells[t], t}, obs.row(t));
  }
  const Matrix<Scalar> values = model_->critic().bind(n).forward(obs);
  for (int t = 0; t < horizon; ++t) {
    Transition tr;
    tr.cell = trace_.cells[t];
    tr.t = t;
    tr.action = trace_.actions[t];
    tr.reward = trace_.rewards[t];
    tr.next_cell = t + 1 < horizon ? trace_.cells[t + 1]
                                   : game_.move(tr.cell, tr.action);
    tr.log_prob_old = std::log(policy.probs(t, tr.cell)[tr.action]);
    tr.value_old = static_cast<double>(values(t, 0));
    tr.population = n;
    tr.episode = episode_;
    buffer_.transitions.push_back(tr);
  }
  last_.episode = episode_;
  last_.population = n;
  last_.ret = ret;
  ++episode_;
}

template <typename Scalar>
LossTerms Trainer<Scalar>::update(TransitionBatch& batch) {
  batch.finalize(config_);
  LossTerms first;
  for (int k = 0; k < config_.epochs; ++k) {
    Tape<Scalar> tape;
    const PpoLoss<Scalar> loss = ppo_loss(tape, *model_, game_, batch, config_);
    if (k == 0) first = loss.terms;
    tape.backward(loss.loss);
    for (auto* store : {&model_->actor_parameters(), &model_->critic_parameters()}) {
      for (std::size_t i = 0; i < store->size(); ++i) {
        if (!(*store)[i].grad.allFinite()) {
          model_->actor_parameters().zero_grad();
          model_->critic_parameters().zero_grad();
          throw TrainingFault("non-finite gradient for '" + (*store)[i].name +
                              "' at update " + std::to_string(updates_));
        }
      }
    }
    actor_adam_.step();
    critic_adam_.step();
  }
  ++updates_;
  return first;
}

template <typename Scalar>
void Trainer<Scalar>::run(long long limit,
                          const std::function<void(const EpisodeLog&)>& on_episode) {
  const FlushDenormals flush;
  const long long stop =
      limit < 0 ? config_.episodes : std::min(config_.episodes, episode_ + limit);
  while (episode_ < stop) {
    play_episode();
    if (episode_ % config_.update_every == 0) {
      const LossTerms terms = update(buffer_);
      buffer_ = TransitionBatch();
      last_.has_loss = true;
      last_.surrogate = terms.surrogate;
      last_.value_error = terms.value_error;
      last_.entropy = terms.entropy;
    }
    if (on_episode) on_episode(last_);
  }
}

template <typename Scalar>
Checkpoint Trainer<Scalar>::save_state() const {
  if (!buffer_.transitions.empty()) {
    throw ContractError("trainer state can only be saved at an update boundary");
  }
  Checkpoint c;
  std::ostringstream rng;
  rng << rng_;
  c.descriptor["trainer.episode"] = std::to_string(episode_);
  c.descriptor["trainer.updates"] = std::to_string(updates_);
  c.descriptor["trainer.actor_steps"] = std::to_string(actor_adam_.steps());
  c.descriptor["trainer.critic_steps"] = std::to_string(critic_adam_.steps());
  c.descriptor["trainer.rng"] = rng.str();
  c.descriptor["trainer.has_loss"] = last_.has_loss ? "1" : "0";
  c.descriptor["trainer.surrogate"] = format_double(last_.surrogate);
  c.descriptor["trainer.value_error"] = format_double(last_.value_error);
  c.descriptor["trainer.entropy"] = format_double(last_.entropy);
  auto add = [&c](const std::string& prefix, const Adam<Scalar>& adam) {
    for (std::size_t i = 0; i < adam.first_moments().size(); ++i) {
      c.add(prefix + "/m/" + std::to_string(i), adam.first_moments()[i]);
      c.add(prefix + "/v/" + std::to_string(i), adam.second_moments()[i]);
    }
  };
  add("adam/actor", actor_adam_);
  add("adam/critic", critic_adam_);
  return c;
}

template <typename Scalar>
void Trainer<Scalar>::restore_state(const Checkpoint& state) {
  auto number = [&state](const std::string& key) {
    return std::stoll(state.descriptor_value(key));
  };
  episode_ = number("trainer.episode");
  updates_ = number("trainer.updates");
  actor_adam_.set_steps(number("trainer.actor_steps"));
  critic_adam_.set_steps(number("trainer.critic_steps"));
  std::istringstream rng(state.descriptor_value("trainer.rng"));
  rng >> rng_;
  if (!rng) throw IoError("corrupt rng state in trainer checkpoint");
  last_.has_loss = state.descriptor_value("trainer.has_loss") == "1";
  last_.surrogate = std::stod(state.descriptor_value("trainer.surrogate"));
  last_.value_error = std::stod(state.descriptor_value("trainer.value_error"));
  last_.entropy = std::stod(state.descriptor_value("trainer.entropy"));
  auto load = [&state](const std::string& prefix, Adam<Scalar>& adam) {
    for (std::size_t i = 0; i < adam.first_moments().size(); ++i) {
      auto& m = adam.first_moments()[i];
      auto& v = adam.second_moments()[i];
      m = state.get<Scalar>(prefix + "/m/" + std::to_string(i), m.rows(), m.cols());
      v = state.get<Scalar>(prefix + "/v/" + std::to_string(i), v.rows(), v.cols());
    }
  };
  load("adam/actor", actor_adam_);
  load("adam/critic", critic_adam_);
  buffer_ = TransitionBatch();
}

template class Trainer<float>;
template class Trainer<double>;

}  // namespace papo
