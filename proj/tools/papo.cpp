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

// papo train | eval | analyze
//
// Exit codes: 0 success, 2 usage or configuration error, 3 runtime fault.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "papo/errors.hpp"
#include "papo/experiment.hpp"

namespace {

using papo::KeyValueConfig;

// Parses repeated "--set section.key=value" flags.
void apply_sets(const std::vector<std::string>& sets, KeyValueConfig& config) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw papo::ConfigError("--set expects section.key=value, got '" + s + "'");
    }
    config.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

struct TrainFlags {
  std::string env, arch, config_path, manifest_path, run_dir, game_set;
  std::optional<int> n_min, n_max;
  std::optional<long long> episodes, seed;
  bool undiscounted = false;
  bool resume = false;
  long long progress = 0;
  std::vector<std::string> sets;
};

int run_train(const TrainFlags& f) {
  if (f.resume) {
    if (f.run_dir.empty()) throw papo::ConfigError("--resume needs --run-dir");
    const auto out = papo::cmd_resume(f.run_dir, f.progress > 0 ? &std::cerr : nullptr,
                                      f.progress > 0 ? f.progress : 1);
    std::cout << out.run_dir << '\n';
    return papo::kExitOk;
  }
  if (!f.config_path.empty() && !f.manifest_path.empty()) {
    throw papo::ConfigError("--config and --from-manifest are mutually exclusive");
  }
  papo::TrainRequest request;
  if (!f.config_path.empty()) request.config = KeyValueConfig::load(f.config_path);
  if (!f.manifest_path.empty()) request.config = KeyValueConfig::load(f.manifest_path);
  KeyValueConfig& c = request.config;
  if (!f.env.empty()) c.set("env.kind", f.env);
  if (!f.arch.empty()) c.set("run.arch", f.arch);
  if (f.n_min) c.set("train.n_min", std::to_string(*f.n_min));
  if (f.n_max) c.set("train.n_max", std::to_string(*f.n_max));
  if (!f.game_set.empty()) c.set("train.game_set", f.game_set);
  if (f.episodes) c.set("train.episodes", std::to_string(*f.episodes));
  if (f.seed) c.set("train.seed", std::to_string(*f.seed));
  if (f.undiscounted) c.set("train.undiscounted_value_target", "true");
  apply_sets(f.sets, c);
  request.run_dir = f.run_dir;
  if (f.progress > 0) {
    request.progress = &std::cerr;
    request.progress_every = f.progress;
  }
  const auto out = papo::cmd_train(request);
  std::cout << out.run_dir << '\n';
  return papo::kExitOk;
}

struct EvalFlags {
  std::string run_dir, output;
  std::optional<std::string> eval_set;
  std::optional<long long> br_episodes, mc_rollouts, seed;
  int naive_from = 0;
  bool progress = false;
  std::vector<std::string> sets;
};

int run_eval(const EvalFlags& f) {
  papo::EvalRequest request;
  request.run_dir = f.run_dir;
  KeyValueConfig& c = request.overrides;
  if (f.eval_set) c.set("eval.eval_set", *f.eval_set);
  if (f.br_episodes) c.set("eval.br_episodes", std::to_string(*f.br_episodes));
  if (f.mc_rollouts) c.set("eval.mc_rollouts", std::to_string(*f.mc_rollouts));
  if (f.seed) c.set("eval.seed", std::to_string(*f.seed));
  apply_sets(f.sets, c);
  request.naive_from = f.naive_from;
  request.output = f.output;
  if (f.progress) request.progress = &std::cerr;
  std::cout << papo::cmd_eval(request) << '\n';
  return papo::kExitOk;
}

struct AnalyzeFlags {
  std::string which, run_dir, form = "simple";
  std::vector<int> n_values;
  std::vector<std::string> encodings;
  int step = 10;
  int m = 1000;
  std::optional<long long> seed;
  long long trajectories = 1000;
  double bin_width = 0.05;
};

int run_analyze(const AnalyzeFlags& f) {
  papo::AnalyzeRequest request;
  request.kind = papo::parse_analysis_kind(f.which);
  request.run_dir = f.run_dir;
  request.n_values = f.n_values;
  request.step = f.step;
  request.probe_size = f.m;
  if (f.seed) request.seed = static_cast<std::uint64_t>(*f.seed);
  request.form = papo::parse_fit_form(f.form);
  for (const auto& e : f.encodings) request.encodings.push_back(papo::parse_encoding_kind(e));
  request.trajectories = f.trajectories;
  request.bin_width = f.bin_width;
  for (const auto& path : papo::cmd_analyze(request)) std::cout << path << '\n';
  return papo::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population-size-aware policy optimization experiments"};
  app.require_subcommand(1);

  TrainFlags train;
  auto* t = app.add_subcommand("train", "train an architecture over a set of games");
  t->add_option("--env", train.env, "exploration, taxi or crowd");
  t->add_option("--arch", train.arch, "ppo, ppo-large, augppo, augppo-large, hyperppo, papo");
  t->add_option("--n-min", train.n_min, "smallest N of the training set");
  t->add_option("--n-max", train.n_max, "largest N of the training set");
  t->add_option("--game-set", train.game_set, "explicit training set, e.g. 10 or 2:20:2");
  t->add_option("--episodes", train.episodes, "training episodes");
  t->add_option("--seed", train.seed, "run seed");
  t->add_option("--config", train.config_path, "configuration file")->check(CLI::ExistingFile);
  t->add_option("--from-manifest", train.manifest_path, "re-run the manifest of a run")
      ->check(CLI::ExistingFile);
  t->add_option("--run-dir", train.run_dir, "run directory (default $PAPO_RUN_ROOT/<run id>)");
  t->add_flag("--resume", train.resume, "continue the run in --run-dir from its checkpoint");
  t->add_flag("--undiscounted-value-target", train.undiscounted,
              "regress the critic on undiscounted returns");
  t->add_option("--set", train.sets, "override any key: section.key=value");
  t->add_option("--progress", train.progress, "print progress every this many episodes");

  EvalFlags eval;
  auto* e = app.add_subcommand("eval", "approximate NashConv over an evaluation set");
  e->add_option("--run-dir", eval.run_dir, "run directory")->required();
  e->add_option("--eval-set", eval.eval_set, "default, unseen or a list such as 10:200:10");
  e->add_option("--br-episodes", eval.br_episodes, "best-response training episodes");
  e->add_option("--mc-rollouts", eval.mc_rollouts, "Monte-Carlo rollouts per value");
  e->add_option("--seed", eval.seed, "evaluation seed");
  e->add_option("--naive-from", eval.naive_from,
                "deploy the policy for this N in every game");
  e->add_option("--output", eval.output, "CSV path (default <run>/eval/nashconv.csv)");
  e->add_option("--set", eval.sets, "override an [eval] key: eval.key=value");
  e->add_flag("--progress", eval.progress, "print one line per evaluated N");

  AnalyzeFlags analyze;
  auto* a = app.add_subcommand("analyze", "cka, fit, kl, rewards or activations");
  a->add_option("which", analyze.which, "cka, fit, kl, rewards or activations")->required();
  a->add_option("--run-dir", analyze.run_dir, "run directory")->required();
  a->add_option("--n", analyze.n_values, "population size (repeatable)");
  a->add_option("--step", analyze.step, "CKA compares N with N + step");
  a->add_option("--m", analyze.m, "probe batch size");
  a->add_option("--seed", analyze.seed, "probe and sampling seed (default: run seed)");
  a->add_option("--form", analyze.form, "simple or general");
  a->add_option("--encoding", analyze.encodings, "be or re (repeatable)");
  a->add_option("--trajectories", analyze.trajectories, "episodes per reward histogram");
  a->add_option("--bin-width", analyze.bin_width, "reward histogram bin width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return papo::kExitUsage;
  }

  try {
    if (*t) return run_train(train);
    if (*e) return run_eval(eval);
    return run_analyze(analyze);
  } catch (const papo::ConfigError& error) {
    std::cerr << "papo: " << error.what() << '\n';
    return papo::kExitUsage;
  } catch (const papo::TrainingFault& error) {
    std::cerr << "papo: training fault: " << error.what() << '\n';
    return papo::kExitRuntime;
  } catch (const std::exception& error) {
    std::cerr << "papo: " << error.what() << '\n';
    return papo::kExitRuntime;
  }
}
