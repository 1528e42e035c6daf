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


#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "papo/envs.hpp"
#include "papo/errors.hpp"
#include "papo/types.hpp"

namespace papo {
namespace {

GameConfig small(EnvKind kind) {
  GameConfig c = default_game_config(kind);
  if (kind == EnvKind::kCrowdInCircle) {
    c.grid_size = 20;
  } else {
    c.grid_size = 4;
    c.grid_height = 3;
  }
  c.horizon = 6;
  return c;
}

// Independent grid/circle move rule.
int expected_move(const GameConfig& c, int cell, int action) {
  if (!c.is_grid()) {
    const int n = c.grid_size;
    if (action == kCircleLeft) return (cell + n - 1) % n;
    if (action == kCircleRight) return (cell + 1) % n;
    return cell;
  }
  const int w = c.width(), h = c.height();
  int x = cell % w, y = cell / w;
  if (action == kLeft && x > 0) --x;
  if (action == kRight && x < w - 1) ++x;
  if (action == kUp && y < h - 1) ++y;
  if (action == kDown && y > 0) --y;
  return y * w + x;
}

TEST(GameConfig, DefaultsAndShapes) {
  const auto e = default_game_config(EnvKind::kExploration);
  EXPECT_EQ(e.state_count(), 100);
  EXPECT_EQ(e.action_count(), 5);
  EXPECT_EQ(e.resolved_start_state(), 5 * 10 + 5);
  const auto c = default_game_config(EnvKind::kCrowdInCircle);
  EXPECT_EQ(c.state_count(), 20);
  EXPECT_EQ(c.action_count(), 3);
  EXPECT_EQ(c.resolved_start_state(), 0);
  auto r = small(EnvKind::kTaxiMatching);
  EXPECT_EQ(r.state_count(), 12);
  EXPECT_DOUBLE_EQ(r.resolved_sigma(), 1.0);
}

TEST(GameConfig, ValidationErrors) {
  auto c = default_game_config(EnvKind::kExploration);
  c.horizon = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_game_config(EnvKind::kExploration);
  c.start_state = 100;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_game_config(EnvKind::kTaxiMatching);
  c.total_order_mass = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_game_config(EnvKind::kCrowdInCircle);
  c.poi_second = 20;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_env_kind("chess"), ConfigError);
}

TEST(GameConfig, KeyValueRoundTrip) {
  for (EnvKind kind : {EnvKind::kExploration, EnvKind::kTaxiMatching,
                       EnvKind::kCrowdInCircle}) {
    const GameConfig c = small(kind);
    KeyValueConfig kv;
    write_game_config(c, kv);
    const GameConfig back = game_config_from(kv);
    EXPECT_EQ(back.env_kind, kind);
    EXPECT_EQ(back.state_count(), c.state_count());
    EXPECT_EQ(back.horizon, c.horizon);
    EXPECT_EQ(back.resolved_start_state(), c.resolved_start_state());
    EXPECT_EQ(parse_env_kind(to_string(kind)), kind);
  }
}

TEST(Game, MovesMatchOracleEverywhere) {
  for (EnvKind kind : {EnvKind::kExploration, EnvKind::kCrowdInCircle}) {
    const GameConfig c = small(kind);
    const Game game(c);
    for (int cell = 0; cell < game.state_count(); ++cell) {
      for (int a = 0; a < game.action_count(); ++a) {
        EXPECT_EQ(game.move(cell, a), expected_move(c, cell, a))
            << to_string(kind) << " cell " << cell << " action " << a;
      }
    }
    EXPECT_THROW(game.move(0, game.action_count()), InvalidStateError);
  }
}

TEST(Game, OrderFieldIsNormalizedGaussian) {
  GameConfig c = default_game_config(EnvKind::kTaxiMatching);
  const Eigen::VectorXd o = order_field(c);
  EXPECT_NEAR(o.sum(), c.total_order_mass, 1e-9);
  // Symmetric about the centre of an even grid.
  EXPECT_NEAR(o(0), o(99), 1e-12);
  EXPECT_NEAR(o(44), o(55), 1e-12);
  EXPECT_GT(o(44), o(0));
  EXPECT_NEAR(o(43) / o(44), std::exp(-(1.5 * 1.5 - 0.5 * 0.5) / (2.0 * 2.5 * 2.5)),
              1e-12);
  EXPECT_THROW(order_field(default_game_config(EnvKind::kExploration)), ConfigError);
}

TEST(Game, RewardsFollowDefinitions) {
  const GameConfig e = small(EnvKind::kExploration);
  JointState joint = {{0, 1}, {0, 1}, {5, 1}, {7, 1}};
  const auto dist = empirical_distribution(joint, e.state_count());
  EXPECT_DOUBLE_EQ(dist.probs.sum(), 1.0);
  EXPECT_DOUBLE_EQ(reward(e, joint[0], dist), std::log(2.0));
  EXPECT_DOUBLE_EQ(reward(e, joint[2], dist), std::log(4.0));

  const GameConfig t = small(EnvKind::kTaxiMatching);
  const Eigen::VectorXd o = order_field(t);
  EXPECT_DOUBLE_EQ(reward(t, joint[3], dist), o(7) * std::log(4.0));

  GameConfig c = small(EnvKind::kCrowdInCircle);
  JointState ring = {{4, 2}, {4, 2}, {14, 2}};
  const auto d2 = empirical_distribution(ring, c.state_count());
  EXPECT_DOUBLE_EQ(reward(c, ring[0], d2), std::log(1.5) + 5.0);
  EXPECT_DOUBLE_EQ(reward(c, ring[2], d2), std::log(3.0));
  ring = {{4, 4}, {14, 4}};
  const auto d3 = empirical_distribution(ring, c.state_count());
  EXPECT_DOUBLE_EQ(reward(c, ring[0], d3), std::log(2.0));
  EXPECT_DOUBLE_EQ(reward(c, ring[1], d3), std::log(2.0) + 5.0);

  const auto empty_cell = empirical_distribution(joint, e.state_count());
  EXPECT_THROW(reward(e, AgentState{3, 1}, empty_cell), InvalidStateError);
}

TEST(Game, TwoAgentsSharingACellEarnLogTwo) {
  const Game game(small(EnvKind::kExploration));
  JointState joint = game.initial_state(2);
  std::vector<double> rewards;
  std::vector<int> counts;
  const std::vector<int> same = {kStay, kStay};
  game.step_in_place(joint, same, rewards, counts);
  EXPECT_DOUBLE_EQ(rewards[0], std::log(1.0));
  EXPECT_DOUBLE_EQ(rewards[1], 0.0);
  const std::vector<int> apart = {kLeft, kRight};
  game.step_in_place(joint, apart, rewards, counts);
  EXPECT_DOUBLE_EQ(rewards[0], std::log(2.0));
  EXPECT_DOUBLE_EQ(rewards[1], std::log(2.0));
}

TEST(Game, StepIsConsistentWithRewardAndDistribution) {
  Rng rng(7);
  for (EnvKind kind : {EnvKind::kExploration, EnvKind::kTaxiMatching,
                       EnvKind::kCrowdInCircle}) {
    const GameConfig c = small(kind);
    const Game game(c);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + uniform_int(rng, 15);
      JointState joint = game.initial_state(n);
      for (int t = 0; t < c.horizon; ++t) {
        std::vector<int> actions(n);
        for (int& a : actions) a = uniform_int(rng, game.action_count());
        const StepResult r = step(c, joint, actions);
        const auto dist = empirical_distribution(r.next, c.state_count());
        EXPECT_NEAR(dist.probs.sum(), 1.0, 1e-12);
        for (int i = 0; i < n; ++i) {
          EXPECT_EQ(r.next[i].cell, expected_move(c, joint[i].cell, actions[i]));
          EXPECT_EQ(r.next[i].t, t + 1);
          EXPECT_NEAR(r.rewards[i], reward(c, r.next[i], dist), 1e-12);
        }
        joint = r.next;
      }
      std::vector<double> rewards;
      std::vector<int> counts;
      std::vector<int> actions(n, 0);
      EXPECT_THROW(game.step_in_place(joint, actions, rewards, counts),
                   EpisodeFinishedError);
    }
  }
}

TEST(Game, StepRejectsMalformedInput) {
  const Game game(small(EnvKind::kExploration));
  JointState joint = game.initial_state(3);
  std::vector<double> rewards;
  std::vector<int> counts;
  const std::vector<int> two = {0, 1};
  EXPECT_THROW(game.step_in_place(joint, two, rewards, counts), InvalidStateError);
  joint[1].t = 2;
  const std::vector<int> three = {0, 1, 2};
  EXPECT_THROW(game.step_in_place(joint, three, rewards, counts), InvalidStateError);
}

TEST(Game, ObservationIsOneHotPlusTime) {
  const GameConfig c = small(EnvKind::kExploration);
  const Game game(c);
  const Eigen::VectorXd v = encode_observation(c, AgentState{5, 3});
  ASSERT_EQ(v.size(), game.observation_width());
  EXPECT_DOUBLE_EQ(v.head(game.state_count()).sum(), 1.0);
  EXPECT_DOUBLE_EQ(v(5), 1.0);
  EXPECT_DOUBLE_EQ(v(game.state_count()), 0.5);
  Eigen::VectorXf w(game.observation_width());
  game.write_observation(AgentState{5, 3}, w.head(game.observation_width()));
  EXPECT_TRUE(w.cast<double>().isApprox(v));
}

}  // namespace
}  // namespace papo
