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

#ifndef PAPO_ROLLOUT_HPP_
#define PAPO_ROLLOUT_HPP_

#include <vector>

#include "papo/envs.hpp"
#include "papo/policy.hpp"
#include "papo/types.hpp"

namespace papo {

// Agent 0's view of one episode.
struct EpisodeTrace {
  std::vector<int> cells;  // cell at t = 0 .. T-1
  std::vector<int> actions;
  std::vector<double> rewards;
  double total = 0.0;
};

// Plays one episode of the N-agent game. Agent 0 follows `focal`, agents
// 1..N-1 follow `others`; both may refer to the same object. Returns agent
// 0's undiscounted return. When `all_rewards` is given, every agent's
// per-step reward is appended to it.
double run_episode(const Game& game, int population, ActionSource& focal,
                   ActionSource& others, Rng& rng, EpisodeTrace* trace = nullptr,
                   std::vector<double>* all_rewards = nullptr);

struct ValueEstimate {
  double mean = 0.0;
  double se = 0.0;
  long long rollouts = 0;
};

// Monte-Carlo estimate of agent 0's episode return.
ValueEstimate evaluate_value(const Game& game, int population, ActionSource& focal,
                             ActionSource& others, long long rollouts, Rng& rng);

}  // namespace papo

#endif  // PAPO_ROLLOUT_HPP_
