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

// Experiment runs: a run directory holds the resolved configuration
// (manifest.cfg), checkpoints and every CSV produced by train, eval and
// analyze. Layout:
//
//   <run>/manifest.cfg
//   <run>/train_log.csv, timing.csv
//   <run>/checkpoints/{latest.ckpt,latest.state,final.ckpt}
//   <run>/eval/*.csv
//   <run>/analysis/*.csv
//   <run>/plots.txt
//
// See docs/formats.md.

#ifndef PAPO_EXPERIMENT_HPP_
#define PAPO_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "papo/analysis.hpp"
#include "papo/config_file.hpp"
#include "papo/envs.hpp"
#include "papo/nashconv.hpp"
#include "papo/policy_zoo.hpp"
#include "papo/ppo.hpp"

namespace papo {

inline constexpr const char* kCodeVersion = "papo 0.1.0";

// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitRuntime = 3 };

struct ExperimentManifest {
  std::string run_id;
  // Every section ([run], [env], [model], [train], [eval]) fully resolved.
  KeyValueConfig config;

  std::string code_version() const;
  std::uint64_t seed() const;
  ArchitectureKind architecture() const;
  GameConfig game() const;
  ModelOptions model_options() const;
  TrainConfig train() const;
  EvalConfig eval() const;

  void save(const std::string& path) const;
  static ExperimentManifest load(const std::string& path);
};

// Fills every default, validates and canonicalizes. `config` needs run.arch
// and env.kind; ConfigError names the missing flag otherwise.
ExperimentManifest resolve_manifest(const KeyValueConfig& config);

// 16 hex digits of FNV-1a over the canonical config text, ignoring [run] id
// and [artifacts].
std::string compute_run_id(const KeyValueConfig& config);

// $PAPO_RUN_ROOT, or "runs" when unset.
std::string run_root();

// "# run: <id>" line that starts every CSV.
void write_run_line(std::ostream& out, const std::string& run_id);

struct TrainRequest {
  KeyValueConfig config;   // file contents merged with flag overrides
  std::string run_dir;     // empty: <run_root>/<run id>
  bool resume = false;     // continue from checkpoints/latest.*
  std::ostream* progress = nullptr;
  long long progress_every = 1000;
};

struct TrainOutcome {
  std::string run_dir;
  std::string run_id;
  long long episodes = 0;
};

// Throws TrainingFault with the last checkpoint path in the message.
TrainOutcome cmd_train(const TrainRequest& request);

// Resumes the run stored in `run_dir`.
TrainOutcome cmd_resume(const std::string& run_dir, std::ostream* progress = nullptr,
                        long long progress_every = 1000);

struct EvalRequest {
  std::string run_dir;
  KeyValueConfig overrides;         // [eval] keys
  int naive_from = 0;               // > 0: deploy the policy for this N everywhere
  std::string output;               // CSV path; empty: eval/nashconv[_naive<N>].csv
  std::ostream* progress = nullptr;
};

// Writes the NashConv CSV and the BR learning curves; returns the CSV path.
std::string cmd_eval(const EvalRequest& request);

enum class AnalysisKind { kCka, kFit, kKl, kRewards, kActivations };

std::string to_string(AnalysisKind kind);
AnalysisKind parse_analysis_kind(const std::string& name);

struct AnalyzeRequest {
  std::string run_dir;
  AnalysisKind kind = AnalysisKind::kCka;
  std::vector<int> n_values;  // empty: a per-analysis default
  int step = 10;              // CKA compares N with N + step
  int probe_size = 1000;      // m
  std::optional<std::uint64_t> seed;  // default: the run seed
  FitForm form = FitForm::kSimple;
  std::vector<EncodingKind> encodings;  // kl; empty: binary and raw
  long long trajectories = 1000;        // rewards
  double bin_width = 0.05;              // rewards
};

// Returns the paths of the CSVs written.
std::vector<std::string> cmd_analyze(const AnalyzeRequest& request);

}  // namespace papo

#endif  // PAPO_EXPERIMENT_HPP_
