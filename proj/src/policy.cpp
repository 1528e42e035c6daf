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

#include "papo/policy.hpp"

#include <cmath>

#include "papo/checkpoint.hpp"
#include "papo/errors.hpp"

namespace papo {

TabularPolicy::TabularPolicy(int horizon, int states, int actions)
    : horizon_(horizon), states_(states), actions_(actions) {
  if (horizon <= 0 || states <= 0 || actions <= 0) {
    throw DomainError("tabular policy dimensions must be positive");
  }
  table_ = Matrix<double>::Constant(static_cast<Index>(horizon) * states, actions,
                                    1.0 / actions);
}

TabularPolicy TabularPolicy::uniform(const Game& game) {
  return TabularPolicy(game.horizon(), game.state_count(), game.action_count());
}

TabularPolicy TabularPolicy::constant_action(const Game& game, int action) {
  if (action < 0 || action >= game.action_count()) {
    throw DomainError("action outside the action set");
  }
  TabularPolicy p = uniform(game);
  p.table_.setZero();
  p.table_.col(action).setOnes();
  return p;
}

void TabularPolicy::set_row(int t, int cell, std::span<const double> p) {
  if (t < 0 || t >= horizon_ || cell < 0 || cell >= states_) {
    throw DomainError("(t, cell) outside the table");
  }
  if (static_cast<int>(p.size()) != actions_) {
    throw DomainError("row length differs from the action count");
  }
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DomainError("negative or NaN probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("row does not sum to 1");
  for (int a = 0; a < actions_; ++a) table_(index(t, cell), a) = p[a];
}

TabularPolicy TabularPolicy::greedy() const {
  TabularPolicy out = *this;
  for (Index r = 0; r < table_.rows(); ++r) {
    Index best = 0;
    table_.row(r).maxCoeff(&best);
    out.table_.row(r).setZero();
    out.table_(r, best) = 1.0;
  }
  return out;
}

std::uint64_t TabularPolicy::checksum() const {
  return fnv1a(table_.data(), sizeof(double) * table_.size());
}

template <typename Scalar>
Matrix<Scalar> observation_table(const Game& game) {
  const int states = game.state_count();
  Matrix<Scalar> obs =
      Matrix<Scalar>::Zero(static_cast<Index>(game.horizon()) * states,
                           game.observation_width());
  for (int t = 0; t < game.horizon(); ++t) {
    for (int s = 0; s < states; ++s) {
      game.write_observation(AgentState{s, t}, obs.row(Index(t) * states + s));
    }
  }
  return obs;
}

Matrix<double> softmax_rows(const Matrix<double>& logits) {
  Matrix<double> p = logits;
  for (Index r = 0; r < p.rows(); ++r) {
    p.row(r).array() -= p.row(r).maxCoeff();
    p.row(r) = p.row(r).array().exp().matrix();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

template <typename Scalar>
TabularPolicy tabulate_policy(const PolicyNetwork<Scalar>& actor, const Game& game,
                              int population) {
  const Matrix<Scalar> logits =
      actor.forward(observation_table<Scalar>(game), population);
  TabularPolicy policy = TabularPolicy::uniform(game);
  if (logits.cols() != game.action_count()) {
    throw DimensionError("actor output width differs from the action count");
  }
  policy.mutable_table() = softmax_rows(logits.template cast<double>());
  return policy;
}

template <typename Scalar>
LazyNetworkPolicy<Scalar>::LazyNetworkPolicy(const Game& game,
                                             BoundNetwork<Scalar> network,
                                             bool greedy)
    : game_(game),
      network_(std::move(network)),
      greedy_(greedy),
      states_(game.state_count()),
      actions_(game.action_count()),
      table_(static_cast<Index>(game.horizon()) * game.state_count(),
             game.action_count()),
      filled_(static_cast<std::size_t>(game.horizon()) * game.state_count(), 0) {}

template <typename Scalar>
void LazyNetworkPolicy<Scalar>::prepare(int t, std::span<const int> cells) {
  pending_.clear();
  for (int c : cells) {
    const std::size_t r = static_cast<std::size_t>(t) * states_ + c;
    if (!filled_[r]) {
      filled_[r] = 1;
      pending_.push_back(c);
    }
  }
  if (pending_.empty()) return;
  Matrix<Scalar> obs(static_cast<Index>(pending_.size()), game_.observation_width());
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    game_.write_observation(AgentState{pending_[i], t}, obs.row(Index(i)));
  }
  const Matrix<double> p =
      softmax_rows(network_.forward(obs).template cast<double>());
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const Index r = static_cast<Index>(t) * states_ + pending_[i];
    if (greedy_) {
      Index best = 0;
      p.row(Index(i)).maxCoeff(&best);
      table_.row(r).setZero();
      table_(r, best) = 1.0;
    } else {
      table_.row(r) = p.row(Index(i));
    }
  }
}

template <typename Scalar>
const double* LazyNetworkPolicy<Scalar>::probs(int t, int cell) const {
  const std::size_t r = static_cast<std::size_t>(t) * states_ + cell;
  if (!filled_[r]) throw ContractError("policy row queried before prepare()");
  return table_.data() + static_cast<Index>(r) * actions_;
}

template Matrix<float> observation_table<float>(const Game&);
template Matrix<double> observation_table<double>(const Game&);
template TabularPolicy tabulate_policy<float>(const PolicyNetwork<float>&, const Game&, int);
template TabularPolicy tabulate_policy<double>(const PolicyNetwork<double>&, const Game&,
                                               int);
template class LazyNetworkPolicy<float>;
template class LazyNetworkPolicy<double>;

}  // namespace papo
