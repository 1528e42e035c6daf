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

#include "papo/envs.hpp"

#include <cmath>

#include "papo/errors.hpp"

namespace papo {

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kExploration:
      return "exploration";
    case EnvKind::kTaxiMatching:
      return "taxi";
    case EnvKind::kCrowdInCircle:
      return "crowd";
  }
  return "unknown";
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "exploration") return EnvKind::kExploration;
  if (name == "taxi" || name == "taxi_matching") return EnvKind::kTaxiMatching;
  if (name == "crowd" || name == "crowd_in_circle") return EnvKind::kCrowdInCircle;
  throw ConfigError("unknown environment '" + name +
                    "' (expected exploration, taxi or crowd)");
}

int GameConfig::height() const {
  if (!is_grid()) return 1;
  return grid_height > 0 ? grid_height : grid_size;
}

int GameConfig::state_count() const {
  return is_grid() ? grid_size * height() : grid_size;
}

int GameConfig::action_count() const { return is_grid() ? 5 : 3; }

int GameConfig::resolved_start_state() const {
  if (start_state >= 0) return start_state;
  if (!is_grid()) return 0;
  return (height() / 2) * grid_size + grid_size / 2;
}

double GameConfig::resolved_sigma() const {
  return gaussian_sigma > 0.0 ? gaussian_sigma : grid_size / 4.0;
}

void GameConfig::validate() const {
  if (grid_size < 1) throw ConfigError("grid_size must be positive");
  if (grid_height < 0) throw ConfigError("grid_height must be >= 0");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (n_agents < 2) throw ConfigError("n_agents must be >= 2");
  const int states = state_count();
  const int start = resolved_start_state();
  if (start < 0 || start >= states) {
    throw ConfigError("start_state " + std::to_string(start) +
                      " outside [0, " + std::to_string(states) + ")");
  }
  if (env_kind == EnvKind::kTaxiMatching) {
    if (!(total_order_mass > 0.0)) {
      throw ConfigError("total_order_mass must be positive");
    }
    if (gaussian_sigma < 0.0) throw ConfigError("gaussian_sigma must be >= 0");
  }
  if (env_kind == EnvKind::kCrowdInCircle) {
    if (poi_first < 0 || poi_first >= states || poi_second < 0 ||
        poi_second >= states) {
      throw ConfigError("points of interest must lie in [0, " +
                        std::to_string(states) + ")");
    }
  }
}

GameConfig default_game_config(EnvKind kind) {
  GameConfig config;
  config.env_kind = kind;
  config.grid_size = kind == EnvKind::kCrowdInCircle ? 20 : 10;
  return config;
}

GameConfig game_config_from(const KeyValueConfig& kv) {
  GameConfig config = default_game_config(
      parse_env_kind(kv.get_string("env.kind", "exploration")));
  config.grid_size =
      static_cast<int>(kv.get_int("env.grid_size", config.grid_size));
  config.grid_height =
      static_cast<int>(kv.get_int("env.grid_height", config.grid_height));
  config.horizon = static_cast<int>(kv.get_int("env.horizon", config.horizon));
  config.n_agents =
      static_cast<int>(kv.get_int("env.n_agents", config.n_agents));
  config.start_state =
      static_cast<int>(kv.get_int("env.start_state", config.start_state));
  config.total_order_mass =
      kv.get_double("env.total_order_mass", config.total_order_mass);
  config.gaussian_sigma =
      kv.get_double("env.gaussian_sigma", config.gaussian_sigma);
  config.poi_first =
      static_cast<int>(kv.get_int("env.poi_first", config.poi_first));
  config.poi_second =
      static_cast<int>(kv.get_int("env.poi_second", config.poi_second));
  config.validate();
  return config;
}

void write_game_config(const GameConfig& game, KeyValueConfig& kv) {
  kv.set("env.kind", to_string(game.env_kind));
  kv.set("env.grid_size", std::to_string(game.grid_size));
  kv.set("env.grid_height", std::to_string(game.height()));
  kv.set("env.horizon", std::to_string(game.horizon));
  kv.set("env.n_agents", std::to_string(game.n_agents));
  kv.set("env.start_state", std::to_string(game.resolved_start_state()));
  kv.set("env.total_order_mass", format_double(game.total_order_mass));
  kv.set("env.gaussian_sigma", format_double(game.resolved_sigma()));
  kv.set("env.poi_first", std::to_string(game.poi_first));
  kv.set("env.poi_second", std::to_string(game.poi_second));
}

GameConfig load_game_config(const std::string& path) {
  return game_config_from(KeyValueConfig::load(path));
}

EmpiricalDistribution empirical_distribution(std::span<const AgentState> joint,
                                             int n_states) {
  if (joint.empty()) throw InvalidStateError("empty joint state");
  EmpiricalDistribution dist{Eigen::VectorXd::Zero(n_states)};
  for (const AgentState& agent : joint) {
    if (agent.cell < 0 || agent.cell >= n_states) {
      throw InvalidStateError("cell " + std::to_string(agent.cell) +
                              " outside [0, " + std::to_string(n_states) + ")");
    }
    dist.probs(agent.cell) += 1.0;
  }
  dist.probs /= static_cast<double>(joint.size());
  return dist;
}

JointState initial_joint_state(const GameConfig& config, int n_agents) {
  return JointState(n_agents, AgentState{config.resolved_start_state(), 0});
}

StepResult step(const GameConfig& config, std::span<const AgentState> joint,
                std::span<const int> actions) {
  const Game game(config);
  StepResult result;
  result.next.assign(joint.begin(), joint.end());
  std::vector<int> counts;
  game.step_in_place(result.next, actions, result.rewards, counts);
  return result;
}

double reward(const GameConfig& config, const AgentState& state,
              const EmpiricalDistribution& dist) {
  const int states = config.state_count();
  if (state.cell < 0 || state.cell >= states || dist.probs.size() != states) {
    throw InvalidStateError("state or distribution does not match the game");
  }
  const double mu = dist.probs(state.cell);
  if (!(mu > 0.0)) {
    throw InvalidStateError("agent's own cell has zero occupancy");
  }
  const double crowding = -std::log(mu);
  switch (config.env_kind) {
    case EnvKind::kExploration:
      return crowding;
    case EnvKind::kTaxiMatching:
      return order_field(config)(state.cell) * crowding;
    case EnvKind::kCrowdInCircle: {
      const int poi =
          2 * state.t <= config.horizon ? config.poi_first : config.poi_second;
      return crowding + (state.cell == poi ? 5.0 : 0.0);
    }
  }
  return 0.0;
}

Eigen::VectorXd order_field(const GameConfig& config) {
  if (config.env_kind != EnvKind::kTaxiMatching) {
    throw ConfigError("order_field is only defined for taxi matching");
  }
  const int width = config.width();
  const int height = config.height();
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double sigma = config.resolved_sigma();
  Eigen::VectorXd field(width * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      field(y * width + x) =
          std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  return field * (config.total_order_mass / field.sum());
}

Eigen::VectorXd encode_observation(const GameConfig& config,
                                   const AgentState& state) {
  const int states = config.state_count();
  if (state.cell < 0 || state.cell >= states) {
    throw InvalidStateError("cell outside the state space");
  }
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(states + 1);
  obs(state.cell) = 1.0;
  obs(states) = static_cast<double>(state.t) / config.horizon;
  return obs;
}

Game::Game(GameConfig config)
    : config_(std::move(config)),
      state_count_(config_.state_count()),
      action_count_(config_.action_count()) {
  GameConfig check = config_;
  check.n_agents = std::max(check.n_agents, 2);
  check.validate();
  if (config_.env_kind == EnvKind::kTaxiMatching) orders_ = order_field(config_);
}

int Game::move(int cell, int action) const {
  if (action < 0 || action >= action_count_) {
    throw InvalidStateError("action " + std::to_string(action) +
                            " outside the action set");
  }
  if (!config_.is_grid()) {
    const int n = state_count_;
    switch (action) {
      case kCircleLeft:
        return (cell + n - 1) % n;
      case kCircleRight:
        return (cell + 1) % n;
      default:
        return cell;
    }
  }
  const int width = config_.width();
  const int height = config_.height();
  int x = cell % width;
  int y = cell / width;
  switch (action) {
    case kLeft:
      x = std::max(x - 1, 0);
      break;
    case kRight:
      x = std::min(x + 1, width - 1);
      break;
    case kUp:
      y = std::min(y + 1, height - 1);
      break;
    case kDown:
      y = std::max(y - 1, 0);
      break;
    default:
      break;
  }
  return y * width + x;
}

int Game::point_of_interest(int t) const {
  return 2 * t <= config_.horizon ? config_.poi_first : config_.poi_second;
}

double Game::reward_at(int cell, int t, int count, int n_agents) const {
  if (count <= 0) {
    throw InvalidStateError("agent's own cell has zero occupancy");
  }
  const double crowding =
      -std::log(static_cast<double>(count) / static_cast<double>(n_agents));
  switch (config_.env_kind) {
    case EnvKind::kExploration:
      return crowding;
    case EnvKind::kTaxiMatching:
      return orders_(cell) * crowding;
    case EnvKind::kCrowdInCircle:
      return crowding + (cell == point_of_interest(t) ? 5.0 : 0.0);
  }
  return 0.0;
}

JointState Game::initial_state(int n_agents) const {
  return initial_joint_state(config_, n_agents);
}

void Game::step_in_place(JointState& joint, std::span<const int> actions,
                         std::vector<double>& rewards,
                         std::vector<int>& counts) const {
  const int n = static_cast<int>(joint.size());
  if (n < 1) throw InvalidStateError("empty joint state");
  if (static_cast<int>(actions.size()) != n) {
    throw InvalidStateError("expected " + std::to_string(n) +
                            " actions, got " + std::to_string(actions.size()));
  }
  const int t = joint.front().t;
  if (t >= config_.horizon) {
    throw EpisodeFinishedError("episode already finished at t = " +
                               std::to_string(t));
  }
  counts.assign(state_count_, 0);
  for (int i = 0; i < n; ++i) {
    AgentState& agent = joint[i];
    if (agent.t != t) throw InvalidStateError("agents disagree on time");
    if (agent.cell < 0 || agent.cell >= state_count_) {
      throw InvalidStateError("cell outside the state space");
    }
    agent.cell = move(agent.cell, actions[i]);
    agent.t = t + 1;
    ++counts[agent.cell];
  }
  rewards.resize(n);
  for (int i = 0; i < n; ++i) {
    rewards[i] = reward_at(joint[i].cell, t + 1, counts[joint[i].cell], n);
  }
}

}  // namespace papo
