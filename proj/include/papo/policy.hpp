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

// Action distributions indexed by (t, cell). Observations are a function of
// (t, cell) only, so any policy network at a fixed N is equivalent to a table
// of T x |S| probability rows. Rollouts query tables instead of networks.

#ifndef PAPO_POLICY_HPP_
#define PAPO_POLICY_HPP_

#include <span>
#include <vector>

#include "papo/envs.hpp"
#include "papo/policy_zoo.hpp"
#include "papo/types.hpp"

namespace papo {

class ActionSource {
 public:
  virtual ~ActionSource() = default;
  // Announces the distinct cells occupied at time t before probs() is queried.
  virtual void prepare(int /*t*/, std::span<const int> /*cells*/) {}
  virtual const double* probs(int t, int cell) const = 0;
  virtual int action_count() const = 0;

  int sample(int t, int cell, Rng& rng) const {
    return sample_categorical(probs(t, cell), action_count(), rng);
  }
};

class TabularPolicy : public ActionSource {
 public:
  // Uniform over actions.
  TabularPolicy(int horizon, int states, int actions);

  static TabularPolicy uniform(const Game& game);
  // Every row puts probability 1 on `action`.
  static TabularPolicy constant_action(const Game& game, int action);

  int horizon() const { return horizon_; }
  int state_count() const { return states_; }
  int action_count() const override { return actions_; }

  const double* probs(int t, int cell) const override {
    return table_.data() + index(t, cell) * actions_;
  }
  // Throws DomainError unless `p` is a distribution of the right length.
  void set_row(int t, int cell, std::span<const double> p);

  // One-hot copy at each row's most likely action (lowest index on ties).
  TabularPolicy greedy() const;

  // Rows indexed t * states + cell.
  const Matrix<double>& table() const { return table_; }
  Matrix<double>& mutable_table() { return table_; }

  std::uint64_t checksum() const;

 private:
  Index index(int t, int cell) const {
    return static_cast<Index>(t) * states_ + cell;
  }

  int horizon_;
  int states_;
  int actions_;
  Matrix<double> table_;
};

// Observation rows for every (t, cell), row t * states + cell.
template <typename Scalar>
Matrix<Scalar> observation_table(const Game& game);

// Softmax of the actor at population N over every (t, cell).
template <typename Scalar>
TabularPolicy tabulate_policy(const PolicyNetwork<Scalar>& actor, const Game& game,
                              int population);

// Row-wise softmax in double precision.
Matrix<double> softmax_rows(const Matrix<double>& logits);

// Evaluates a bound network only on the rows a rollout actually visits.
template <typename Scalar>
class LazyNetworkPolicy : public ActionSource {
 public:
  LazyNetworkPolicy(const Game& game, BoundNetwork<Scalar> network,
                    bool greedy = false);

  void prepare(int t, std::span<const int> cells) override;
  const double* probs(int t, int cell) const override;
  int action_count() const override { return actions_; }

 private:
  const Game& game_;
  BoundNetwork<Scalar> network_;
  bool greedy_;
  int states_;
  int actions_;
  Matrix<double> table_;
  std::vector<char> filled_;
  std::vector<int> pending_;
};

extern template class LazyNetworkPolicy<float>;
extern template class LazyNetworkPolicy<double>;

}  // namespace papo

#endif  // PAPO_POLICY_HPP_
