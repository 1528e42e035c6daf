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

#include "papo/rollout.hpp"

#include <cmath>

#include "papo/errors.hpp"

namespace papo {

double run_episode(const Game& game, int population, ActionSource& focal,
                   ActionSource& others, Rng& rng, EpisodeTrace* trace,
                   std::vector<double>* all_rewards) {
  if (population < 1) throw DomainError("population must be at least 1");
  const int horizon = game.horizon();
  const int states = game.state_count();
  const bool shared = &focal == &others;
  std::vector<int> cells(population, game.config().resolved_start_state());
  std::vector<int> counts(states, 0);
  std::vector<int> stamp(states, -1);
  std::vector<int> distinct;
  std::vector<int> actions(population);
  if (trace) {
    trace->cells.assign(horizon, 0);
    trace->actions.assign(horizon, 0);
    trace->rewards.assign(horizon, 0.0);
    trace->total = 0.0;
  }
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    distinct.clear();
    for (int i = shared ? 0 : 1; i < population; ++i) {
      if (stamp[cells[i]] != t) {
        stamp[cells[i]] = t;
        distinct.push_back(cells[i]);
      }
    }
    if (!distinct.empty()) others.prepare(t, distinct);
    if (!shared) focal.prepare(t, std::span<const int>(&cells[0], 1));

    actions[0] = focal.sample(t, cells[0], rng);
    for (int i = 1; i < population; ++i) actions[i] = others.sample(t, cells[i], rng);

    if (trace) {
      trace->cells[t] = cells[0];
      trace->actions[t] = actions[0];
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < population; ++i) {
      cells[i] = game.move(cells[i], actions[i]);
      ++counts[cells[i]];
    }
    const double r = game.reward_at(cells[0], t + 1, counts[cells[0]], population);
    total += r;
    if (trace) trace->rewards[t] = r;
    if (all_rewards) {
      for (int i = 0; i < population; ++i) {
        all_rewards->push_back(
            i == 0 ? r : game.reward_at(cells[i], t + 1, counts[cells[i]], population));
      }
    }
  }
  if (trace) trace->total = total;
  return total;
}

ValueEstimate evaluate_value(const Game& game, int population, ActionSource& focal,
                             ActionSource& others, long long rollouts, Rng& rng) {
  if (rollouts < 1) throw DomainError("at least one rollout is required");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long long k = 0; k < rollouts; ++k) {
    const double v = run_episode(game, population, focal, others, rng);
    sum += v;
    sum_sq += v * v;
  }
  ValueEstimate est;
  est.rollouts = rollouts;
  est.mean = sum / rollouts;
  if (rollouts > 1) {
    const double var =
        std::max(0.0, (sum_sq - rollouts * est.mean * est.mean) / (rollouts - 1));
    est.se = std::sqrt(var / rollouts);
  }
  return est;
}

}  // namespace papo
