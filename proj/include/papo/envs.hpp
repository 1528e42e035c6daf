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

// N-agent population games on a grid or a circle. Agents are homogeneous and
// interact only through the empirical distribution of their states:
//
//   exploration    r = -log mu(s)
//   taxi matching  r = -o_s log mu(s), o_s a Gaussian field of order mass
//   crowd circle   r = -log mu(s) + 5 * [s is the point of interest at t]
//
// Dynamics are deterministic. Grid moves into a wall leave the agent in place;
// circle moves wrap around.

#ifndef PAPO_ENVS_HPP_
#define PAPO_ENVS_HPP_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "papo/config_file.hpp"

namespace papo {

enum class EnvKind { kExploration, kTaxiMatching, kCrowdInCircle };

std::string to_string(EnvKind kind);
EnvKind parse_env_kind(const std::string& name);

// Grid actions; circle games use only kLeft, kRight and kStay, which are
// renumbered 0, 1, 2 (see action_count()).
enum GridAction : int { kLeft = 0, kRight = 1, kUp = 2, kDown = 3, kStay = 4 };
enum CircleAction : int { kCircleLeft = 0, kCircleRight = 1, kCircleStay = 2 };

struct GameConfig {
  EnvKind env_kind = EnvKind::kExploration;
  // Grid width M; the number of circle states for kCrowdInCircle.
  int grid_size = 10;
  // Grid height; 0 means square (M x M).
  int grid_height = 0;
  int horizon = 20;
  int n_agents = 2;
  // -1 selects the default: the grid centre cell, circle state 0.
  int start_state = -1;
  double total_order_mass = 100.0;
  // Standard deviation of the order Gaussian; <= 0 selects grid_size / 4.
  double gaussian_sigma = 0.0;
  int poi_first = 4;
  int poi_second = 14;

  int width() const { return grid_size; }
  int height() const;
  int state_count() const;
  int action_count() const;
  int resolved_start_state() const;
  double resolved_sigma() const;
  bool is_grid() const { return env_kind != EnvKind::kCrowdInCircle; }

  // Throws ConfigError on any violated invariant.
  void validate() const;
};

// Reads the [env] section: kind, grid_size, grid_height, horizon, n_agents,
// start_state, total_order_mass, gaussian_sigma, poi_first, poi_second.
GameConfig game_config_from(const KeyValueConfig& config);
void write_game_config(const GameConfig& game, KeyValueConfig& config);
GameConfig load_game_config(const std::string& path);

// Default GameConfig for an environment (grid 10x10, circle of 20 states).
GameConfig default_game_config(EnvKind kind);

struct AgentState {
  int cell = 0;
  int t = 0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

using JointState = std::vector<AgentState>;

struct EmpiricalDistribution {
  Eigen::VectorXd probs;
};

// z(s) = (1/N) * #{i : s_i = s}.
EmpiricalDistribution empirical_distribution(std::span<const AgentState> joint,
                                             int n_states);

JointState initial_joint_state(const GameConfig& config, int n_agents);

struct StepResult {
  JointState next;
  std::vector<double> rewards;
};

// Moves all agents, then rewards each one on the post-move distribution.
StepResult step(const GameConfig& config, std::span<const AgentState> joint,
                std::span<const int> actions);

double reward(const GameConfig& config, const AgentState& state,
              const EmpiricalDistribution& dist);

// Discretized isotropic Gaussian over the grid, normalized to
// total_order_mass. Only defined for taxi matching.
Eigen::VectorXd order_field(const GameConfig& config);

// One-hot cell followed by t / T; length state_count() + 1.
Eigen::VectorXd encode_observation(const GameConfig& config,
                                   const AgentState& state);

// Immutable game instance caching per-configuration data (order field).
// Safe to share between threads.
class Game {
 public:
  explicit Game(GameConfig config);

  const GameConfig& config() const { return config_; }
  int state_count() const { return state_count_; }
  int action_count() const { return action_count_; }
  int horizon() const { return config_.horizon; }
  int observation_width() const { return state_count_ + 1; }

  int move(int cell, int action) const;
  int point_of_interest(int t) const;

  // Reward for an agent at `cell` at time `t` when `count` of the N agents
  // occupy that cell.
  double reward_at(int cell, int t, int count, int n_agents) const;

  JointState initial_state(int n_agents) const;

  // Advances `joint` in place; `rewards` receives one entry per agent.
  // `counts` is scratch space of size state_count().
  void step_in_place(JointState& joint, std::span<const int> actions,
                     std::vector<double>& rewards,
                     std::vector<int>& counts) const;

  // Writes the observation of `state` into `out` (length observation_width()).
  template <typename Derived>
  void write_observation(const AgentState& state,
                         Eigen::MatrixBase<Derived>&& out) const {
    out.setZero();
    out(state.cell) = 1;
    out(state_count_) = static_cast<typename Derived::Scalar>(
        static_cast<double>(state.t) / config_.horizon);
  }

  const Eigen::VectorXd& orders() const { return orders_; }

 private:
  GameConfig config_;
  int state_count_;
  int action_count_;
  Eigen::VectorXd orders_;
};

}  // namespace papo

#endif  // PAPO_ENVS_HPP_
