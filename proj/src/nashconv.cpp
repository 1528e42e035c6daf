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

#include "papo/nashconv.hpp"

#include <cmath>
#include <ostream>

#include "papo/errors.hpp"

namespace papo {

std::vector<int> EvalConfig::default_eval_set() { return parse_int_list("10:200:10"); }
std::vector<int> EvalConfig::unseen_eval_set() { return parse_int_list("220:400:20"); }

TrainConfig EvalConfig::default_br_train() {
  TrainConfig c;
  c.actor_lr = 3e-4;
  c.critic_lr = 3e-4;
  return c;
}

void EvalConfig::validate() const {
  for (int n : eval_set) {
    if (n < 1) throw ConfigError("eval: population sizes must be positive");
  }
  if (br_episodes < 1) throw ConfigError("eval: br_episodes must be positive");
  if (mc_rollouts < 1) throw ConfigError("eval: mc_rollouts must be at least 1");
  if (curve_window < 1) throw ConfigError("eval: curve_window must be positive");
  TrainConfig check = br_train;
  check.game_set = {1};
  check.episodes = br_episodes;
  check.validate();
}

EvalConfig eval_config_from(const KeyValueConfig& config) {
  EvalConfig c;
  const std::string set = config.get_string("eval.eval_set", "default");
  if (set == "default") {
    c.eval_set = EvalConfig::default_eval_set();
  } else if (set == "unseen") {
    c.eval_set = EvalConfig::unseen_eval_set();
  } else {
    c.eval_set = parse_int_list(set);
  }
  c.br_episodes = config.get_int("eval.br_episodes", c.br_episodes);
  c.mc_rollouts = config.get_int("eval.mc_rollouts", c.mc_rollouts);
  c.seed = static_cast<std::uint64_t>(config.get_int("eval.seed", 0));
  c.br_architecture = parse_architecture_kind(
      config.get_string("eval.br_architecture", to_string(c.br_architecture)));
  c.br_train.actor_lr = config.get_double("eval.br_actor_lr", c.br_train.actor_lr);
  c.br_train.critic_lr = config.get_double("eval.br_critic_lr", c.br_train.critic_lr);
  c.greedy_br = config.get_bool("eval.greedy_br", c.greedy_br);
  c.curve_window = static_cast<int>(config.get_int("eval.curve_window", c.curve_window));
  c.validate();
  return c;
}

void write_eval_config(const EvalConfig& c, KeyValueConfig& config) {
  config.set("eval.eval_set", format_int_list(c.eval_set));
  config.set("eval.br_episodes", std::to_string(c.br_episodes));
  config.set("eval.mc_rollouts", std::to_string(c.mc_rollouts));
  config.set("eval.seed", std::to_string(c.seed));
  config.set("eval.br_architecture", to_string(c.br_architecture));
  config.set("eval.br_actor_lr", format_double(c.br_train.actor_lr));
  config.set("eval.br_critic_lr", format_double(c.br_train.critic_lr));
  config.set("eval.greedy_br", c.greedy_br ? "true" : "false");
  config.set("eval.curve_window", std::to_string(c.curve_window));
}

ConvergenceCheck check_convergence(const std::vector<CurvePoint>& curve) {
  ConvergenceCheck out;
  const std::size_t n = std::max<std::size_t>(3, curve.size() / 10);
  if (curve.size() < 3) return out;
  const std::size_t begin = curve.size() - std::min(n, curve.size());
  const double count = static_cast<double>(curve.size() - begin);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = begin; i < curve.size(); ++i) {
    mx += curve[i].episode;
    my += curve[i].mean_return;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < curve.size(); ++i) {
    sxx += (curve[i].episode - mx) * (curve[i].episode - mx);
    sxy += (curve[i].episode - mx) * (curve[i].mean_return - my);
  }
  if (sxx <= 0.0) return out;
  out.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = begin; i < curve.size(); ++i) {
    const double fit = my + out.slope * (curve[i].episode - mx);
    ssr += (curve[i].mean_return - fit) * (curve[i].mean_return - fit);
  }
  const double se = std::sqrt(ssr / std::max(1.0, count - 2.0) / sxx);
  out.t_statistic = se > 0.0 ? out.slope / se : (out.slope == 0.0 ? 0.0 : INFINITY);
  out.drift = out.slope * (curve.back().episode - curve[begin].episode);
  out.converged = std::abs(out.t_statistic) < 2.0 ||
                  std::abs(out.drift) <= 0.01 * std::max(std::abs(my), 1e-12);
  return out;
}

namespace {

TrainConfig br_train_config(const EvalConfig& config, int population) {
  TrainConfig c = config.br_train;
  c.game_set = {population};
  c.episodes = config.br_episodes;
  c.seed = derive_seed(config.seed, 0x4252000000ULL + population);
  return c;
}

}  // namespace

BestResponse train_best_response(const Game& game, const TabularPolicy& frozen,
                                 int population, const EvalConfig& config) {
  const TrainConfig train = br_train_config(config, population);
  ModelOptions options;
  ActorCritic<float> model = ActorCritic<float>::build(
      config.br_architecture, game.config(), options, derive_seed(train.seed, 1));
  TabularPolicy opponents = frozen;
  std::vector<CurvePoint> curve;
  {
    Trainer<float> trainer(game, model, train, &opponents);
    double window_sum = 0.0;
    int in_window = 0;
    trainer.run(-1, [&](const EpisodeLog& log) {
      window_sum += log.ret;
      if (++in_window == config.curve_window) {
        curve.push_back({log.episode + 1, window_sum / in_window});
        window_sum = 0.0;
        in_window = 0;
      }
    });
    if (in_window > 0) {
      curve.push_back({trainer.episode(), window_sum / in_window});
    }
  }
  TabularPolicy table = tabulate_policy(model.actor(), game, population);
  if (config.greedy_br) table = table.greedy();
  ConvergenceCheck convergence = check_convergence(curve);
  return BestResponse{std::move(model), std::move(table), std::move(curve), convergence};
}

NashConvRow nashconv(const Game& game, const TabularPolicy& frozen, int population,
                     const EvalConfig& config, const std::string& method,
                     std::vector<CurvePoint>* curve) {
  BestResponse br = train_best_response(game, frozen, population, config);
  TabularPolicy others = frozen;
  TabularPolicy self = frozen;
  Rng rng_current(derive_seed(config.seed, 0x5643000000ULL + population));
  Rng rng_br(derive_seed(config.seed, 0x5642000000ULL + population));
  const ValueEstimate current =
      evaluate_value(game, population, self, others, config.mc_rollouts, rng_current);
  const ValueEstimate best =
      evaluate_value(game, population, br.policy, others, config.mc_rollouts, rng_br);
  NashConvRow row;
  row.method = method;
  row.population = population;
  row.value_current = current.mean;
  row.se_current = current.se;
  row.value_br = best.mean;
  row.se_br = best.se;
  row.gap = best.mean - current.mean;
  row.nashconv = std::max(row.gap, 0.0);
  row.se = std::sqrt(current.se * current.se + best.se * best.se);
  row.br_episodes = config.br_episodes;
  row.mc_rollouts = config.mc_rollouts;
  row.br_converged = br.convergence.converged;
  if (curve) *curve = std::move(br.curve);
  return row;
}

NashConvReport nashconv_sweep(const Game& game, const ActorCritic<float>& model,
                              const EvalConfig& config, const std::string& method,
                              int policy_population) {
  config.validate();
  NashConvReport report;
  for (int n : config.eval_set) {
    const TabularPolicy frozen = tabulate_policy(
        model.actor(), game, policy_population > 0 ? policy_population : n);
    std::vector<CurvePoint> curve;
    report.rows.push_back(nashconv(game, frozen, n, config, method, &curve));
    report.curves.push_back(std::move(curve));
  }
  return report;
}

void write_nashconv_csv(std::ostream& out, const std::vector<NashConvRow>& rows) {
  out << "method,N,value_current,se_current,value_br,se_br,gap,nashconv,se,"
         "br_episodes,mc_rollouts,br_converged\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.population << ',' << format_double(r.value_current)
        << ',' << format_double(r.se_current) << ',' << format_double(r.value_br) << ','
        << format_double(r.se_br) << ',' << format_double(r.gap) << ','
        << format_double(r.nashconv) << ',' << format_double(r.se) << ','
        << r.br_episodes << ',' << r.mc_rollouts << ',' << (r.br_converged ? 1 : 0)
        << '\n';
  }
}

void write_curves_csv(std::ostream& out, const NashConvReport& report) {
  out << "method,N,episode,mean_return\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    for (const auto& p : report.curves[i]) {
      out << report.rows[i].method << ',' << report.rows[i].population << ','
          << p.episode << ',' << format_double(p.mean_return) << '\n';
    }
  }
}

}  // namespace papo
