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

#include "papo/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "papo/checkpoint.hpp"
#include "papo/errors.hpp"

namespace papo {

namespace fs = std::filesystem;

namespace {

bool is_volatile_key(const std::string& key) {
  return key == "run.id" || key.rfind("artifacts.", 0) == 0;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

constexpr const char* kTrainLog = "train_log.csv";
constexpr const char* kTiming = "timing.csv";
constexpr const char* kLatest = "checkpoints/latest.ckpt";
constexpr const char* kState = "checkpoints/latest.state";
constexpr const char* kFinal = "checkpoints/final.ckpt";

struct PlotEntry {
  const char* prefix;
  const char* plot;
};

// CSV name prefix -> what to draw from it.
constexpr PlotEntry kPlots[] = {
    {"train_log", "training curve: return against episode, one series per N"},
    {"eval/nashconv", "approximate NashConv against N with +-se bars, one series per method"},
    {"eval/br_curves", "best-response learning curves: mean_return against episode per N"},
    {"analysis/cka", "CKA similarity of generated policies: rho_input, rho_hidden, rho_output against N"},
    {"analysis/fit_", "scaling-law fit of the CKA curve: estimates with se and p per layer"},
    {"analysis/kl_", "KL divergence to the uniform policy: kappa against N per encoding"},
    {"analysis/rewards_w1", "Wasserstein-1 distance between reward distributions against N"},
    {"analysis/rewards_N", "per-step reward histogram: count against bin_start"},
    {"analysis/activations", "layer activations for external embedding (UMAP) plots"},
};

void update_plot_manifest(const fs::path& dir, const std::string& run_id) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(fs::relative(entry.path(), dir).generic_string());
    }
  }
  std::sort(files.begin(), files.end());
  std::ofstream out = open_output(dir / "plots.txt");
  out << "# run: " << run_id << "\n# file\tplot\n";
  for (const auto& f : files) {
    for (const auto& p : kPlots) {
      if (f.rfind(p.prefix, 0) == 0) {
        out << f << '\t' << p.plot << '\n';
        break;
      }
    }
  }
}

ExperimentManifest load_run(const std::string& run_dir) {
  const fs::path path = fs::path(run_dir) / "manifest.cfg";
  if (!fs::exists(path)) {
    throw ConfigError("'" + run_dir + "' is not a run directory (no manifest.cfg)");
  }
  return ExperimentManifest::load(path.string());
}

ActorCritic<float> load_model(const std::string& run_dir) {
  const fs::path dir(run_dir);
  for (const char* name : {kFinal, kLatest}) {
    if (fs::exists(dir / name)) {
      return ActorCritic<float>::from_checkpoint(read_checkpoint((dir / name).string()));
    }
  }
  throw ConfigError("no checkpoint in '" + run_dir + "/checkpoints'");
}

void write_log_row(std::ostream& out, const EpisodeLog& log) {
  out << log.episode << ',' << log.population << ',' << format_double(log.ret);
  if (log.has_loss) {
    out << ',' << format_double(log.surrogate) << ',' << format_double(log.value_error)
        << ',' << format_double(log.entropy);
  } else {
    out << ",,,";
  }
  out << '\n';
}

// Drops rows at or after `episode` so a resumed run continues the file.
void truncate_log(const fs::path& path, long long episode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream kept;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '#' || !std::isdigit(static_cast<unsigned char>(line[0])))) {
      kept << line << '\n';
      continue;
    }
    if (!line.empty() && std::stoll(line.substr(0, line.find(','))) < episode) {
      kept << line << '\n';
    }
  }
  in.close();
  std::ofstream out = open_output(path);
  out << kept.str();
}

TrainOutcome train_in(const fs::path& dir, const ExperimentManifest& manifest, bool resume,
                      std::ostream* progress, long long progress_every) {
  const Game game(manifest.game());
  const TrainConfig train = manifest.train();
  ActorCritic<float> model = ActorCritic<float>::build(
      manifest.architecture(), game.config(), manifest.model_options(), manifest.seed());
  Trainer<float> trainer(game, model, train);

  std::ofstream log, timing;
  if (resume) {
    if (!fs::exists(dir / kLatest) || !fs::exists(dir / kState)) {
      throw ConfigError("no checkpoint to resume in '" + dir.string() + "'");
    }
    model.load_parameters(read_checkpoint((dir / kLatest).string()));
    trainer.restore_state(read_checkpoint((dir / kState).string()));
    truncate_log(dir / kTrainLog, trainer.episode());
    log = open_output(dir / kTrainLog, std::ios::app);
    timing = open_output(dir / kTiming, std::ios::app);
  } else {
    log = open_output(dir / kTrainLog);
    write_run_line(log, manifest.run_id);
    log << "episode,N,return,L1,L2,H\n";
    timing = open_output(dir / kTiming);
    write_run_line(timing, manifest.run_id);
    timing << "episode,updates,wall_seconds\n";
  }

  const auto start = std::chrono::steady_clock::now();
  std::string last_checkpoint;
  auto save = [&](bool final) {
    log.flush();
    Checkpoint params = model.to_checkpoint();
    params.descriptor["run.id"] = manifest.run_id;
    params.descriptor["trainer.episode"] = std::to_string(trainer.episode());
    write_checkpoint(params, (dir / kLatest).string());
    write_checkpoint(trainer.save_state(), (dir / kState).string());
    if (final) write_checkpoint(params, (dir / kFinal).string());
    last_checkpoint = (dir / kLatest).string();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    timing << trainer.episode() << ',' << trainer.updates() << ',' << format_double(seconds)
           << '\n';
    timing.flush();
  };
  if (resume) last_checkpoint = (dir / kLatest).string();

  const long long cadence = 10LL * train.update_every;
  try {
    trainer.run(-1, [&](const EpisodeLog& row) {
      write_log_row(log, row);
      const long long done = row.episode + 1;
      if (done % train.update_every == 0 && trainer.updates() % cadence == 0 &&
          done < train.episodes) {
        save(false);
      }
      if (progress && done % progress_every == 0) {
        *progress << "episode " << done << "/" << train.episodes << " N=" << row.population
                  << " return=" << format_double(row.ret) << '\n';
      }
    });
  } catch (const TrainingFault& fault) {
    log.flush();
    throw TrainingFault(std::string(fault.what()) + "; last checkpoint: " +
                        (last_checkpoint.empty() ? "none" : last_checkpoint));
  }
  // A partial final batch (episodes not a multiple of E) is dropped.
  if (trainer.episode() % train.update_every != 0) {
    trainer.discard_buffer();
  }
  save(true);
  update_plot_manifest(dir, manifest.run_id);
  return TrainOutcome{dir.string(), manifest.run_id, trainer.episode()};
}

}  // namespace

std::string ExperimentManifest::code_version() const {
  return config.get_string("run.code_version", "");
}

std::uint64_t ExperimentManifest::seed() const {
  return static_cast<std::uint64_t>(config.get_int("train.seed", 0));
}

ArchitectureKind ExperimentManifest::architecture() const {
  return parse_architecture_kind(config.get("run.arch"));
}

GameConfig ExperimentManifest::game() const { return game_config_from(config); }
ModelOptions ExperimentManifest::model_options() const { return model_options_from(config); }
TrainConfig ExperimentManifest::train() const { return train_config_from(config); }
EvalConfig ExperimentManifest::eval() const { return eval_config_from(config); }

void ExperimentManifest::save(const std::string& path) const { config.save(path); }

ExperimentManifest ExperimentManifest::load(const std::string& path) {
  ExperimentManifest m;
  m.config = KeyValueConfig::load(path);
  m.run_id = m.config.get("run.id");
  return m;
}

std::string compute_run_id(const KeyValueConfig& config) {
  KeyValueConfig stable;
  for (const auto& [key, value] : config.entries()) {
    if (!is_volatile_key(key)) stable.set(key, value);
  }
  const std::string text = stable.to_string();
  return hex64(fnv1a(text.data(), text.size()));
}

ExperimentManifest resolve_manifest(const KeyValueConfig& input) {
  if (!input.has("run.arch")) throw ConfigError("missing required option --arch (run.arch)");
  if (!input.has("env.kind")) throw ConfigError("missing required option --env (env.kind)");
  const ArchitectureKind arch = parse_architecture_kind(input.get("run.arch"));
  const GameConfig game = game_config_from(input);
  ModelOptions model = model_options_from(input);
  if (model.trunk[0] == 0 && model.trunk[1] == 0) model.trunk = default_trunk(game.env_kind);
  const TrainConfig train = train_config_from(input);
  if (is_population_aware(arch) || is_hyper(arch)) {
    const std::vector<int> pops = train.populations();
    const int largest = *std::max_element(pops.begin(), pops.end());
    if (model.encoding == EncodingKind::kBinary && model.encoding_bits < 31 &&
        largest >= (1 << model.encoding_bits)) {
      throw ConfigError("train: N = " + std::to_string(largest) + " does not fit in " +
                        std::to_string(model.encoding_bits) + " encoding bits");
    }
  }
  KeyValueConfig with_seed = input;
  if (!input.has("eval.seed")) with_seed.set("eval.seed", std::to_string(train.seed));
  const EvalConfig eval = eval_config_from(with_seed);

  ExperimentManifest m;
  m.config.set("run.arch", to_string(arch));
  m.config.set("run.code_version", kCodeVersion);
  write_game_config(game, m.config);
  write_model_options(model, m.config);
  write_train_config(train, m.config);
  write_eval_config(eval, m.config);
  for (const auto& [key, value] : input.entries()) {
    if (!is_volatile_key(key) && !m.config.has(key)) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  m.config.set("artifacts.train_log", kTrainLog);
  m.config.set("artifacts.timing", kTiming);
  m.config.set("artifacts.checkpoint_latest", kLatest);
  m.config.set("artifacts.trainer_state", kState);
  m.config.set("artifacts.checkpoint_final", kFinal);
  m.run_id = compute_run_id(m.config);
  m.config.set("run.id", m.run_id);
  return m;
}

std::string run_root() {
  const char* root = std::getenv("PAPO_RUN_ROOT");
  return root && *root ? std::string(root) : std::string("runs");
}

void write_run_line(std::ostream& out, const std::string& run_id) {
  out << "# run: " << run_id << '\n';
}

TrainOutcome cmd_train(const TrainRequest& request) {
  const ExperimentManifest manifest = resolve_manifest(request.config);
  const fs::path dir = request.run_dir.empty() ? fs::path(run_root()) / manifest.run_id
                                               : fs::path(request.run_dir);
  const fs::path manifest_path = dir / "manifest.cfg";
  if (fs::exists(manifest_path)) {
    const ExperimentManifest existing = ExperimentManifest::load(manifest_path.string());
    if (existing.run_id != manifest.run_id) {
      throw ConfigError("run directory '" + dir.string() + "' holds run " +
                        existing.run_id + ", not " + manifest.run_id);
    }
  }
  if (request.resume) {
    if (!fs::exists(manifest_path)) {
      throw ConfigError("nothing to resume in '" + dir.string() + "'");
    }
  } else {
    fs::create_directories(dir / "checkpoints");
    manifest.save(manifest_path.string());
  }
  return train_in(dir, manifest, request.resume, request.progress, request.progress_every);
}

TrainOutcome cmd_resume(const std::string& run_dir, std::ostream* progress,
                        long long progress_every) {
  const ExperimentManifest manifest = load_run(run_dir);
  return train_in(fs::path(run_dir), manifest, true, progress, progress_every);
}

std::string cmd_eval(const EvalRequest& request) {
  const ExperimentManifest manifest = load_run(request.run_dir);
  KeyValueConfig config = manifest.config;
  for (const auto& [key, value] : request.overrides.entries()) {
    if (key.rfind("eval.", 0) != 0) throw ConfigError("eval: unexpected override '" + key + "'");
    config.set(key, value);
  }
  const EvalConfig eval = eval_config_from(config);
  const ActorCritic<float> model = load_model(request.run_dir);
  const Game game(manifest.game());
  if (request.naive_from < 0) throw ConfigError("eval: --naive-from must be positive");

  const fs::path dir(request.run_dir);
  const std::string suffix =
      request.naive_from > 0 ? "_naive" + std::to_string(request.naive_from) : "";
  const fs::path csv =
      request.output.empty() ? dir / ("eval/nashconv" + suffix + ".csv") : fs::path(request.output);
  const fs::path curves = csv.parent_path() /
                          ("br_curves" + suffix + (request.output.empty()
                                                       ? std::string()
                                                       : "_" + csv.stem().string()) +
                           ".csv");
  const std::string method =
      request.naive_from > 0 ? to_string(manifest.architecture()) + "-naive@" +
                                   std::to_string(request.naive_from)
                             : to_string(manifest.architecture());

  NashConvReport report;
  for (int n : eval.eval_set) {
    EvalConfig one = eval;
    one.eval_set = {n};
    NashConvReport part = nashconv_sweep(game, model, one, method, request.naive_from);
    if (request.progress) {
      const NashConvRow& r = part.rows.front();
      *request.progress << "N=" << n << " nashconv=" << format_double(r.nashconv)
                        << " se=" << format_double(r.se) << '\n';
    }
    report.rows.push_back(part.rows.front());
    report.curves.push_back(std::move(part.curves.front()));
  }

  KeyValueConfig used;
  write_eval_config(eval, used);
  std::ofstream out = open_output(csv);
  write_run_line(out, manifest.run_id);
  write_nashconv_csv(out, report.rows);
  std::ofstream curve_out = open_output(curves);
  write_run_line(curve_out, manifest.run_id);
  write_curves_csv(curve_out, report);
  used.save((csv.parent_path() / (csv.stem().string() + ".cfg")).string());
  update_plot_manifest(dir, manifest.run_id);
  return csv.string();
}

std::string to_string(AnalysisKind kind) {
  switch (kind) {
    case AnalysisKind::kCka: return "cka";
    case AnalysisKind::kFit: return "fit";
    case AnalysisKind::kKl: return "kl";
    case AnalysisKind::kRewards: return "rewards";
    case AnalysisKind::kActivations: return "activations";
  }
  return "?";
}

AnalysisKind parse_analysis_kind(const std::string& name) {
  for (AnalysisKind k : {AnalysisKind::kCka, AnalysisKind::kFit, AnalysisKind::kKl,
                         AnalysisKind::kRewards, AnalysisKind::kActivations}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown analysis '" + name + "' (cka, fit, kl, rewards, activations)");
}

namespace {

std::vector<int> default_cka_populations(int step) {
  std::vector<int> out;
  for (int n : EvalConfig::default_eval_set()) {
    if (n + step <= 200) out.push_back(n);
  }
  return out;
}

CkaCurve run_cka(const AnalyzeRequest& request, const ExperimentManifest& manifest,
                 const Game& game, std::uint64_t seed) {
  if (request.step < 1) throw ConfigError("analyze: --step must be positive");
  if (!is_hyper(manifest.architecture())) {
    throw ConfigError("CKA curves need a hypernetwork run (hyperppo or papo); '" +
                      to_string(manifest.architecture()) +
                      "' stores a single network, so compare per-N checkpoints instead");
  }
  const ActorCritic<float> model = load_model(request.run_dir);
  const std::vector<int> pops =
      request.n_values.empty() ? default_cka_populations(request.step) : request.n_values;
  return cka_curve(model, game, pops, request.step, request.probe_size, seed);
}

}  // namespace

std::vector<std::string> cmd_analyze(const AnalyzeRequest& request) {
  const ExperimentManifest manifest = load_run(request.run_dir);
  const Game game(manifest.game());
  const std::uint64_t seed = request.seed.value_or(manifest.seed());
  const fs::path dir = fs::path(request.run_dir) / "analysis";
  if (request.probe_size < 1) throw ConfigError("analyze: --m must be positive");
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    written.push_back((dir / name).string());
    std::ofstream out = open_output(dir / name);
    write_run_line(out, manifest.run_id);
    return out;
  };

  switch (request.kind) {
    case AnalysisKind::kCka: {
      const CkaCurve curve = run_cka(request, manifest, game, seed);
      std::ofstream out = open("cka.csv");
      write_cka_csv(out, curve);
      break;
    }
    case AnalysisKind::kFit: {
      const CkaCurve curve = run_cka(request, manifest, game, seed);
      std::ofstream out = open("fit_" + to_string(request.form) + ".csv");
      const char* layers[] = {"input", "hidden", "output"};
      for (int l = 0; l < 3; ++l) {
        std::vector<double> n, rho;
        for (const auto& row : curve.rows) {
          if (row.degenerate || std::isnan(row.rho[l])) continue;
          n.push_back(row.population);
          rho.push_back(row.rho[l]);
        }
        const FitResult fit = fit_scaling_law(n, rho, request.form);
        write_fit_csv(out, layers[l], fit, l == 0);
      }
      break;
    }
    case AnalysisKind::kKl: {
      const std::vector<int> pops =
          request.n_values.empty() ? manifest.train().populations() : request.n_values;
      const ProbeBatch probe = sample_probe_batch(game, request.probe_size, seed);
      std::vector<EncodingKind> encodings = request.encodings;
      if (encodings.empty()) encodings = {EncodingKind::kBinary, EncodingKind::kRaw};
      std::ofstream init = open("kl_init.csv");
      for (std::size_t i = 0; i < encodings.size(); ++i) {
        ModelOptions options = manifest.model_options();
        options.encoding = encodings[i];
        const ActorCritic<float> fresh = ActorCritic<float>::build(
            manifest.architecture(), game.config(), options, manifest.seed());
        write_kl_csv(init, to_string(encodings[i]),
                     kl_table(fresh, game, pops, probe.observations), i == 0);
      }
      const fs::path ckpt_dir = fs::path(request.run_dir) / "checkpoints";
      if (fs::exists(ckpt_dir / "final.ckpt") || fs::exists(ckpt_dir / "latest.ckpt")) {
        const ActorCritic<float> trained = load_model(request.run_dir);
        const EncodingKind used = manifest.model_options().encoding;
        std::ofstream out = open("kl_trained.csv");
        const bool listed =
            std::find(encodings.begin(), encodings.end(), used) != encodings.end();
        write_kl_csv(out, to_string(used),
                     listed ? kl_table(trained, game, pops, probe.observations)
                            : std::vector<KlRow>{},
                     true);
      }
      break;
    }
    case AnalysisKind::kRewards: {
      const std::vector<int> pops =
          request.n_values.empty() ? std::vector<int>{2, 110, 200} : request.n_values;
      std::vector<RewardHistogram> hists;
      for (int n : pops) {
        hists.push_back(reward_distribution(game, n, request.trajectories,
                                            derive_seed(seed, 0x5257000000ULL + n),
                                            request.bin_width));
        std::ofstream out = open("rewards_N" + std::to_string(n) + ".csv");
        write_histogram_csv(out, hists.back());
      }
      std::ofstream out = open("rewards_w1.csv");
      out << "N_base,N,w1\n";
      for (std::size_t i = 0; i < hists.size(); ++i) {
        out << pops.front() << ',' << pops[i] << ','
            << format_double(wasserstein1(hists.front(), hists[i])) << '\n';
      }
      break;
    }
    case AnalysisKind::kActivations: {
      const TrainConfig train = manifest.train();
      const std::vector<int> pops =
          request.n_values.empty()
              ? std::vector<int>{train.populations().front(), train.populations().back()}
              : request.n_values;
      const ActorCritic<float> model = load_model(request.run_dir);
      const ProbeBatch probe = sample_probe_batch(game, request.probe_size, seed);
      std::ofstream out = open("activations.csv");
      export_activations(out, model, game, probe.states, pops);
      break;
    }
  }
  update_plot_manifest(fs::path(request.run_dir), manifest.run_id);
  return written;
}

}  // namespace papo
