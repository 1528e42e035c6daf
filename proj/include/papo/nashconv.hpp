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

// Approximate NashConv of a representative agent:
//
//   NashConv(pi, N) = V(BR, pi^{-1}) - V(pi)
//
// BR is trained with PPO while agents 1..N-1 follow the frozen policy; both
// values are Monte-Carlo means with standard errors.

#ifndef PAPO_NASHCONV_HPP_
#define PAPO_NASHCONV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "papo/config_file.hpp"
#include "papo/policy.hpp"
#include "papo/policy_zoo.hpp"
#include "papo/ppo.hpp"
#include "papo/rollout.hpp"

namespace papo {

struct EvalConfig {
  std::vector<int> eval_set = default_eval_set();
  long long br_episodes = 1000000;
  long long mc_rollouts = 100;
  std::uint64_t seed = 0;
  ArchitectureKind br_architecture = ArchitectureKind::kPPO;
  // Learning hyperparameters of the best-response learner; game_set, episodes
  // and seed are overridden per evaluation.
  TrainConfig br_train = default_br_train();
  // Evaluate the BR by its most likely action in each state.
  bool greedy_br = true;
  // Episodes averaged into one BR curve point.
  int curve_window = 100;

  static std::vector<int> default_eval_set();  // 10, 20, ..., 200
  static std::vector<int> unseen_eval_set();   // 220, 240, ..., 400
  static TrainConfig default_br_train();
  void validate() const;
};

// Reads the [eval] section.
EvalConfig eval_config_from(const KeyValueConfig& config);
void write_eval_config(const EvalConfig& eval, KeyValueConfig& config);

struct CurvePoint {
  long long episode = 0;  // episodes completed at the end of the window
  double mean_return = 0.0;
};

// Slope test over the last 10% of a training curve.
struct ConvergenceCheck {
  double slope = 0.0;       // per episode
  double t_statistic = 0.0;
  double drift = 0.0;       // slope times the window span
  bool converged = false;
};

ConvergenceCheck check_convergence(const std::vector<CurvePoint>& curve);

struct BestResponse {
  ActorCritic<float> model;
  TabularPolicy policy;  // tabulated (greedy when configured) at N
  std::vector<CurvePoint> curve;
  ConvergenceCheck convergence;
};

BestResponse train_best_response(const Game& game, const TabularPolicy& frozen,
                                 int population, const EvalConfig& config);

struct NashConvRow {
  std::string method;
  int population = 0;
  double value_current = 0.0;
  double se_current = 0.0;
  double value_br = 0.0;
  double se_br = 0.0;
  double gap = 0.0;       // value_br - value_current, unclipped
  double nashconv = 0.0;  // max(gap, 0)
  double se = 0.0;        // standard error of gap
  long long br_episodes = 0;
  long long mc_rollouts = 0;
  bool br_converged = false;
};

// Seed streams are derived from config.seed and N, so rows for different N
// are independent of evaluation order.
NashConvRow nashconv(const Game& game, const TabularPolicy& frozen, int population,
                     const EvalConfig& config, const std::string& method,
                     std::vector<CurvePoint>* curve = nullptr);

struct NashConvReport {
  std::vector<NashConvRow> rows;
  std::vector<std::vector<CurvePoint>> curves;  // one per row
};

// Evaluates `model` at every N of config.eval_set. A positive
// `policy_population` deploys the policy generated for that N in every game
// (the naive protocol); otherwise each game gets its own policy.
NashConvReport nashconv_sweep(const Game& game, const ActorCritic<float>& model,
                              const EvalConfig& config, const std::string& method,
                              int policy_population = 0);

void write_nashconv_csv(std::ostream& out, const std::vector<NashConvRow>& rows);
void write_curves_csv(std::ostream& out, const NashConvReport& report);

}  // namespace papo

#endif  // PAPO_NASHCONV_HPP_
