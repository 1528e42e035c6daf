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

// Acceptance criteria c01..c12. Usage:
//
//   papo_acceptance [--work-dir DIR] [c01 c02 ...]
//
// Prints one "[PASS]" or "[FAIL]" line per criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "papo/analysis.hpp"
#include "papo/errors.hpp"
#include "papo/experiment.hpp"
#include "papo/nashconv.hpp"
#include "papo/pop_encoding.hpp"
#include "papo/ppo.hpp"
#include "papo/stats.hpp"

namespace fs = std::filesystem;
using namespace papo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(4) << v;
  return out.str();
}

fs::path g_work_dir = "acceptance_runs";

// ---------------------------------------------------------------- c01

// A batch of T-step episodes at several N with old log-probs offset from the
// current policy so that some ratios are clipped and some are not, all away
// from the clip boundaries.
TransitionBatch gradient_batch(const ActorCritic<double>& model, const Game& game,
                               const std::vector<int>& pops, Rng& rng,
                               const TrainConfig& config) {
  TransitionBatch batch;
  long long episode = 0;
  for (int n : pops) {
    const TabularPolicy pi = tabulate_policy(model.actor(), game, n);
    for (int rep = 0; rep < 2; ++rep, ++episode) {
      for (int t = 0; t < game.horizon(); ++t) {
        Transition tr;
        tr.cell = uniform_int(rng, game.state_count());
        tr.t = t;
        tr.action = uniform_int(rng, game.action_count());
        tr.reward = 2.0 * uniform01(rng) - 1.0;
        tr.next_cell = game.move(tr.cell, tr.action);
        static const double kRatios[] = {0.6, 0.9, 1.1, 1.45};
        const double ratio = kRatios[uniform_int(rng, 4)] * (1.0 + 0.05 * uniform01(rng));
        tr.log_prob_old = std::log(pi.probs(t, tr.cell)[tr.action]) - std::log(ratio);
        tr.value_old = uniform01(rng);
        tr.population = n;
        tr.episode = episode;
        batch.transitions.push_back(tr);
      }
    }
  }
  batch.finalize(config);
  return batch;
}

double loss_value(const ActorCritic<double>& model, const Game& game,
                  const TransitionBatch& batch, const TrainConfig& config) {
  Tape<double> tape;
  return ppo_loss(tape, model, game, batch, config).loss.scalar();
}

Outcome c01_gradients() {
  GameConfig gc = default_game_config(EnvKind::kTaxiMatching);
  gc.grid_size = 3;
  gc.horizon = 3;
  const Game game(gc);
  ModelOptions options;
  options.hidden = {6, 5};
  options.trunk = {4, 3};
  options.embedding_width = 5;
  options.encoding_bits = 5;
  options.head_init_scale = 0.5;
  options.output_init_scale = 0.5;
  TrainConfig config;
  config.game_set = {3, 7, 12};
  Rng rng(101);
  double worst = 0.0;
  std::string worst_leaf;
  std::size_t leaves = 0;
  for (ArchitectureKind kind : kAllArchitectures) {
    ActorCritic<double> model = ActorCritic<double>::build(kind, gc, options, 11);
    // Zero-initialized biases put ReLU inputs exactly on the kink; move to a
    // generic point of parameter space.
    for (auto* store : {&model.actor_parameters(), &model.critic_parameters()}) {
      for (std::size_t i = 0; i < store->size(); ++i) {
        for (Index k = 0; k < (*store)[i].value.size(); ++k) {
          (*store)[i].value.data()[k] += 0.4 * uniform01(rng) - 0.2;
        }
      }
    }
    const TransitionBatch batch = gradient_batch(model, game, config.game_set, rng, config);
    model.actor_parameters().zero_grad();
    model.critic_parameters().zero_grad();
    {
      Tape<double> tape;
      const PpoLoss<double> loss = ppo_loss(tape, model, game, batch, config);
      tape.backward(loss.loss);
    }
    for (auto* store : {&model.actor_parameters(), &model.critic_parameters()}) {
      for (std::size_t i = 0; i < store->size(); ++i) {
        Parameter<double>& p = (*store)[i];
        const Matrix<double> analytic = p.grad;
        Matrix<double> numeric(p.value.rows(), p.value.cols());
        for (Index k = 0; k < p.value.size(); ++k) {
          const double saved = p.value.data()[k];
          const double h = 1e-6 * std::max(1.0, std::abs(saved));
          p.value.data()[k] = saved + h;
          const double up = loss_value(model, game, batch, config);
          p.value.data()[k] = saved - h;
          const double down = loss_value(model, game, batch, config);
          p.value.data()[k] = saved;
          numeric.data()[k] = (up - down) / (2.0 * h);
        }
        const double scale = std::max({analytic.norm(), numeric.norm(), 1e-6});
        const double rel = (analytic - numeric).norm() / scale;
        ++leaves;
        if (rel > worst) {
          worst = rel;
          worst_leaf = to_string(kind) + ":" + p.name;
        }
      }
    }
  }
  return {worst < 1e-4, std::to_string(leaves) + " leaves over 6 architectures, max rel error " +
                            fmt(worst) + " (" + worst_leaf + ")"};
}

// ---------------------------------------------------------------- c02

Outcome c02_encoding() {
  int bad = 0;
  for (long long n = 1; n <= 4095; ++n) {
    const PopulationEncoding e = encode_population(n, 12);
    if (e.width() != 12 || e.decode() != n) ++bad;
  }
  bool overflow = false;
  try {
    encode_population(4096, 12);
  } catch (const OverflowError&) {
    overflow = true;
  }
  return {bad == 0 && overflow, std::to_string(bad) + " round-trip mismatches in [1, 4095]; N=4096 " +
                                    (overflow ? "raises OverflowError" : "did not raise")};
}

// ---------------------------------------------------------------- c03

// Independent reference for the movement rules.
int expected_cell(const GameConfig& c, int cell, int action) {
  if (!c.is_grid()) {
    const int n = c.state_count();
    if (action == 0) return (cell - 1 + n) % n;
    if (action == 1) return (cell + 1) % n;
    return cell;
  }
  int x = cell % c.width(), y = cell / c.width();
  if (action == 0 && x > 0) --x;
  if (action == 1 && x + 1 < c.width()) ++x;
  if (action == 2 && y + 1 < c.height()) ++y;
  if (action == 3 && y > 0) --y;
  return y * c.width() + x;
}

Outcome c03_environments() {
  std::ostringstream detail;
  bool pass = true;
  for (EnvKind kind : {EnvKind::kExploration, EnvKind::kTaxiMatching, EnvKind::kCrowdInCircle}) {
    const GameConfig gc = default_game_config(kind);
    Rng rng(derive_seed(3, static_cast<int>(kind)));
    double worst_sum = 0.0;
    long long move_errors = 0, reward_errors = 0;
    for (int episode = 0; episode < 10000; ++episode) {
      const int n = 1 + uniform_int(rng, 30);
      JointState joint = initial_joint_state(gc, n);
      for (int t = 0; t < gc.horizon; ++t) {
        std::vector<int> actions(n);
        for (int& a : actions) a = uniform_int(rng, gc.action_count());
        const StepResult r = step(gc, joint, actions);
        const EmpiricalDistribution z = empirical_distribution(r.next, gc.state_count());
        worst_sum = std::max(worst_sum, std::abs(z.probs.sum() - 1.0));
        for (int i = 0; i < n; ++i) {
          if (r.next[i].cell != expected_cell(gc, joint[i].cell, actions[i]) ||
              r.next[i].t != t + 1) {
            ++move_errors;
          }
          if (kind == EnvKind::kExploration &&
              (r.rewards[i] < 0.0 || r.rewards[i] > std::log(n) + 1e-12)) {
            ++reward_errors;
          }
        }
        joint = r.next;
      }
    }
    double poi_bonus = 5.0;
    if (kind == EnvKind::kCrowdInCircle) {
      EmpiricalDistribution z{Eigen::VectorXd::Zero(gc.state_count())};
      for (int t = 0; t <= gc.horizon; ++t) {
        const int poi = 2 * t <= gc.horizon ? gc.poi_first : gc.poi_second;
        const int off = (poi + 3) % gc.state_count();
        for (double mass : {0.1, 0.25, 0.5}) {
          z.probs.setZero();
          z.probs(poi) = mass;
          z.probs(off) = mass;
          const double d = reward(gc, AgentState{poi, t}, z) - reward(gc, AgentState{off, t}, z);
          if (std::abs(d - 5.0) > std::abs(poi_bonus - 5.0)) poi_bonus = d;
        }
      }
    }
    const bool ok = worst_sum <= 1e-9 && move_errors == 0 && reward_errors == 0 &&
                    std::abs(poi_bonus - 5.0) < 1e-12;
    pass = pass && ok;
    detail << to_string(kind) << ": |sum z - 1| <= " << fmt(worst_sum) << ", " << move_errors
           << " move errors, " << reward_errors << " reward-range errors";
    if (kind == EnvKind::kCrowdInCircle) detail << ", PoI bonus " << fmt(poi_bonus);
    detail << "; ";
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- c04

// Two cells side by side, both agents start in the right one, one step.
GameConfig two_cell_game() {
  GameConfig gc = default_game_config(EnvKind::kExploration);
  gc.grid_size = 2;
  gc.grid_height = 1;
  gc.horizon = 1;
  gc.start_state = 1;
  return gc;
}

// Exact value of agent 0 playing `self` against `other` by enumerating both
// agents' actions.
double exact_value(const Game& game, const std::vector<double>& self,
                   const std::vector<double>& other) {
  const int start = game.config().resolved_start_state();
  double v = 0.0;
  for (int a0 = 0; a0 < game.action_count(); ++a0) {
    for (int a1 = 0; a1 < game.action_count(); ++a1) {
      const int c0 = game.move(start, a0), c1 = game.move(start, a1);
      const int count = c0 == c1 ? 2 : 1;
      v += self[a0] * other[a1] * game.reward_at(c0, 1, count, 2);
    }
  }
  return v;
}

Outcome c04_exact_nashconv() {
  const Game game(two_cell_game());
  const int actions = game.action_count();
  // Symmetric policies indexed by the probability q of moving left.
  auto policy = [&](double q) {
    std::vector<double> p(actions, (1.0 - q) / (actions - 1));
    p[kLeft] = q;
    return p;
  };
  double nash_q = 0.0, worst_q = 0.0;
  double nash_gap = INFINITY, worst_gap = -INFINITY;
  for (int i = 0; i <= 100; ++i) {
    const double q = i / 100.0;
    const std::vector<double> pi = policy(q);
    double best = -INFINITY;
    for (int a = 0; a < actions; ++a) {
      std::vector<double> pure(actions, 0.0);
      pure[a] = 1.0;
      best = std::max(best, exact_value(game, pure, pi));
    }
    const double gap = best - exact_value(game, pi, pi);
    if (gap < nash_gap) nash_gap = gap, nash_q = q;
    if (gap > worst_gap) worst_gap = gap, worst_q = q;
  }
  EvalConfig config;
  config.br_episodes = 2000;
  config.mc_rollouts = 10000;
  config.seed = 4;
  auto table = [&](double q) {
    TabularPolicy t(1, game.state_count(), actions);
    for (int cell = 0; cell < game.state_count(); ++cell) t.set_row(0, cell, policy(q));
    return t;
  };
  const NashConvRow nash = nashconv(game, table(nash_q), 2, config, "oracle");
  const NashConvRow worst = nashconv(game, table(worst_q), 2, config, "oracle");
  // A deterministic policy has zero Monte-Carlo variance; the floor absorbs
  // floating-point summation error only.
  const bool nash_ok = std::abs(nash.gap) < 3.0 * nash.se;
  const bool worst_ok = std::abs(worst.gap - worst_gap) < std::max(3.0 * worst.se, 1e-9);
  return {nash_ok && worst_ok,
          "enumerated Nash q=" + fmt(nash_q) + " (exact gap " + fmt(nash_gap) +
              "): nashconv gap " + fmt(nash.gap) + " se " + fmt(nash.se) +
              "; worst q=" + fmt(worst_q) + " exact gap " + fmt(worst_gap) +
              ": nashconv gap " + fmt(worst.gap) + " se " + fmt(worst.se)};
}

// ---------------------------------------------------------------- c05

std::vector<NashConvRow> read_nashconv(const fs::path& csv) {
  std::ifstream in(csv);
  std::vector<NashConvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("method", 0) == 0) continue;
    std::stringstream s(line);
    std::string cell;
    std::vector<std::string> f;
    while (std::getline(s, cell, ',')) f.push_back(cell);
    NashConvRow r;
    r.method = f[0];
    r.population = std::stoi(f[1]);
    r.gap = std::stod(f[6]);
    r.nashconv = std::stod(f[7]);
    r.se = std::stod(f[8]);
    rows.push_back(r);
  }
  return rows;
}

Outcome c05_taxi_small_scale() {
  const fs::path root = g_work_dir / "c05";
  fs::remove_all(root);
  auto base = [](const std::string& arch) {
    KeyValueConfig c;
    c.set("run.arch", arch);
    c.set("env.kind", "taxi");
    c.set("env.grid_size", "5");
    c.set("train.episodes", "200000");
    c.set("train.seed", "5");
    c.set("eval.eval_set", "2:20:2");
    c.set("eval.br_episodes", "20000");
    c.set("eval.mc_rollouts", "1000");
    return c;
  };
  KeyValueConfig papo = base("papo");
  papo.set("train.n_min", "2");
  papo.set("train.n_max", "20");
  KeyValueConfig naive = base("ppo");
  naive.set("train.game_set", "10");

  const auto start = std::chrono::steady_clock::now();
  std::map<std::string, std::vector<NashConvRow>> results;
  for (const auto& [name, config] : {std::pair{std::string("papo"), papo},
                                     std::pair{std::string("naive"), naive}}) {
    TrainRequest request;
    request.config = config;
    request.run_dir = (root / name).string();
    request.progress = &std::cerr;
    request.progress_every = 20000;
    cmd_train(request);
    EvalRequest eval;
    eval.run_dir = request.run_dir;
    eval.naive_from = name == "naive" ? 10 : 0;
    eval.progress = &std::cerr;
    results[name] = read_nashconv(cmd_eval(eval));
  }
  const double hours =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 3600.0;
  int wins = 0;
  std::ostringstream detail;
  const auto& p = results["papo"];
  const auto& n = results["naive"];
  for (std::size_t i = 0; i < p.size() && i < n.size(); ++i) {
    if (n[i].nashconv > p[i].nashconv) ++wins;
    detail << " N=" << p[i].population << ":" << fmt(n[i].nashconv) << "/" << fmt(p[i].nashconv);
  }
  const std::size_t total = p.size();
  return {total == 10 && wins >= 8,
          "PPO-Naive worse than PAPO on " + std::to_string(wins) + "/" + std::to_string(total) +
              " N (naive/papo:" + detail.str() + "), " + fmt(hours) + " h"};
}

// ---------------------------------------------------------------- c06

Outcome c06_cka() {
  Rng rng(6);
  std::normal_distribution<double> normal;
  auto random_matrix = [&](Index r, Index c) {
    Eigen::MatrixXd m(r, c);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
  };
  double worst_invariance = 0.0, lo = INFINITY, hi = -INFINITY, worst_symmetry = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 10 + uniform_int(rng, 60);
    const Index q = 1 + uniform_int(rng, 40);
    const Index q2 = 1 + uniform_int(rng, 40);
    const Eigen::MatrixXd x = random_matrix(m, q);
    const Eigen::MatrixXd y = random_matrix(m, q2) + 0.5 * random_matrix(m, 1).replicate(1, q2);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(q, q));
    const Eigen::MatrixXd orth = qr.householderQ();
    const double s = 0.1 + 10.0 * uniform01(rng);
    for (double v : {linear_cka(x, x), linear_cka(x, x * orth), linear_cka(x, s * x)}) {
      worst_invariance = std::max(worst_invariance, std::abs(v - 1.0));
    }
    const double xy = linear_cka(x, y);
    const double yx = linear_cka(y, x);
    worst_symmetry = std::max(worst_symmetry, std::abs(xy - yx));
    lo = std::min(lo, xy);
    hi = std::max(hi, xy);
  }
  return {worst_invariance < 1e-6 && lo >= 0.0 && hi <= 1.0 + 1e-9 && worst_symmetry < 1e-12,
          "max |CKA - 1| over self/orthogonal/scaled = " + fmt(worst_invariance) +
              "; random pairs in [" + fmt(lo) + ", " + fmt(hi) + "]; asymmetry " +
              fmt(worst_symmetry)};
}

// ---------------------------------------------------------------- c07

Outcome c07_curve_fit() {
  std::vector<double> n, rho;
  for (int k = 10; k <= 200; k += 10) {
    n.push_back(k);
    rho.push_back(1.0 - 2.0 / std::sqrt(static_cast<double>(k)));
  }
  const FitResult simple = fit_scaling_law(n, rho, FitForm::kSimple);
  const FitResult general = fit_scaling_law(n, rho, FitForm::kGeneral);
  const double da = std::abs(simple.estimates[0] - 2.0);
  const double db = std::abs(simple.estimates[1] - 0.5);
  const bool simple_ok =
      da < 1e-6 && db < 1e-6 && simple.p_values[0] < 0.05 && simple.p_values[1] < 0.05;
  const bool general_ok = general.p_values[2] > 0.05 && general.p_values[3] > 0.05;
  return {simple_ok && general_ok,
          "simple: |da|=" + fmt(da) + " |db|=" + fmt(db) + " p(a)=" + fmt(simple.p_values[0]) +
              " p(b)=" + fmt(simple.p_values[1]) + "; general: p(c)=" +
              fmt(general.p_values[2]) + " p(d)=" + fmt(general.p_values[3])};
}

// ---------------------------------------------------------------- c08

Outcome c08_init_entropy() {
  bool pass = true;
  std::ostringstream detail;
  std::vector<int> all;
  for (int k = 2; k <= 200; ++k) all.push_back(k);
  const std::vector<int> trend = {2, 50, 100, 200};
  for (EnvKind kind : {EnvKind::kExploration, EnvKind::kTaxiMatching, EnvKind::kCrowdInCircle}) {
    const GameConfig gc = default_game_config(kind);
    const Game game(gc);
    const ProbeBatch probe = sample_probe_batch(game, 1000, 8);
    ModelOptions be;
    const auto papo_be = ActorCritic<float>::build(ArchitectureKind::kPAPO, gc, be, 8);
    double max_be = 0.0;
    for (const KlRow& r : kl_table(papo_be, game, all, probe.observations)) {
      max_be = std::max(max_be, r.kappa);
    }
    ModelOptions re;
    re.encoding = EncodingKind::kRaw;
    const auto papo_re = ActorCritic<float>::build(ArchitectureKind::kPAPO, gc, re, 8);
    std::vector<double> xs, ks;
    for (const KlRow& r : kl_table(papo_re, game, trend, probe.observations)) {
      xs.push_back(r.population);
      ks.push_back(r.kappa);
    }
    const double rs = spearman_correlation(xs, ks);
    pass = pass && max_be < 0.05 && rs > 0.0;
    detail << to_string(kind) << ": max BE kappa " << fmt(max_be) << ", RE kappa(2,50,100,200) = ("
           << fmt(ks[0]) << ", " << fmt(ks[1]) << ", " << fmt(ks[2]) << ", " << fmt(ks[3])
           << ") Spearman " << fmt(rs) << "; ";
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- c09

Outcome c09_gae() {
  Rng rng(9);
  double worst = 0.0;
  for (int episode = 0; episode < 1000; ++episode) {
    const int horizon = 1 + uniform_int(rng, 40);
    const double gamma = uniform01(rng);
    const double lambda = uniform01(rng);
    std::vector<double> r(horizon), v(horizon + 1);
    for (double& x : r) x = 10.0 * uniform01(rng) - 5.0;
    for (int t = 0; t < horizon; ++t) v[t] = 10.0 * uniform01(rng) - 5.0;
    v[horizon] = 0.0;
    const std::vector<double> gae = compute_gae(r, v, gamma, lambda);
    for (int t = 0; t < horizon; ++t) {
      // A_t = sum_l (gamma lambda)^l delta_{t+l}, delta_k = r_k + gamma V_{k+1} - V_k.
      double direct = 0.0;
      for (int l = 0; t + l < horizon; ++l) {
        const int k = t + l;
        direct += std::pow(gamma * lambda, l) * (r[k] + gamma * v[k + 1] - v[k]);
      }
      worst = std::max(worst, std::abs(direct - gae[t]));
    }
  }
  return {worst < 1e-10, "max |recursion - double sum| = " + fmt(worst) + " over 1000 episodes"};
}

// ---------------------------------------------------------------- c10

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome c10_reproducibility() {
  const fs::path root = g_work_dir / "c10";
  fs::remove_all(root);
  KeyValueConfig c;
  c.set("run.arch", "papo");
  c.set("env.kind", "exploration");
  c.set("env.grid_size", "5");
  c.set("env.horizon", "10");
  c.set("train.n_min", "2");
  c.set("train.n_max", "20");
  c.set("train.episodes", "260");
  c.set("train.seed", "10");
  TrainRequest first;
  first.config = c;
  first.run_dir = (root / "a").string();
  const TrainOutcome a = cmd_train(first);
  TrainRequest second;
  second.config = KeyValueConfig::load((root / "a" / "manifest.cfg").string());
  second.run_dir = (root / "b").string();
  const TrainOutcome b = cmd_train(second);
  int differing = 0;
  std::string names;
  for (const char* f : {"manifest.cfg", "train_log.csv", "checkpoints/latest.ckpt",
                        "checkpoints/latest.state", "checkpoints/final.ckpt"}) {
    const std::string x = file_bytes(root / "a" / f);
    const std::string y = file_bytes(root / "b" / f);
    if (x.empty() || x != y) {
      ++differing;
      names += std::string(" ") + f;
    }
  }
  return {a.run_id == b.run_id && differing == 0,
          "run ids " + a.run_id + " / " + b.run_id + ", " + std::to_string(differing) +
              " differing artifacts" + names};
}

// ---------------------------------------------------------------- c11

Outcome c11_parity() {
  bool pass = true;
  std::ostringstream detail;
  for (EnvKind kind : {EnvKind::kExploration, EnvKind::kTaxiMatching, EnvKind::kCrowdInCircle}) {
    const GameConfig gc = default_game_config(kind);
    std::vector<std::pair<std::string, double>> counts;
    for (ArchitectureKind arch : {ArchitectureKind::kPAPO, ArchitectureKind::kHyperPPO,
                                  ArchitectureKind::kPPOLarge, ArchitectureKind::kAugPPOLarge}) {
      const auto model = ActorCritic<float>::build(arch, gc, ModelOptions{}, 11);
      counts.emplace_back(to_string(arch), static_cast<double>(
                                               model.actor_parameters().parameter_count() +
                                               model.critic_parameters().parameter_count()));
    }
    double worst = 0.0;
    for (const auto& [na, a] : counts) {
      for (const auto& [nb, b] : counts) worst = std::max(worst, std::abs(a - b) / std::min(a, b));
    }
    pass = pass && worst <= 0.10;
    detail << to_string(kind) << ":";
    for (const auto& [name, v] : counts) detail << ' ' << name << '=' << static_cast<long long>(v);
    detail << " (max pairwise diff " << fmt(100.0 * worst) << "%); ";
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- c12

Outcome c12_reward_shift() {
  const Game game(default_game_config(EnvKind::kExploration));
  const RewardHistogram h2 = reward_distribution(game, 2, 1000, 12);
  const RewardHistogram h110 = reward_distribution(game, 110, 1000, 12);
  const RewardHistogram h200 = reward_distribution(game, 200, 1000, 12);
  const double d110 = wasserstein1(h2, h110);
  const double d200 = wasserstein1(h2, h200);
  return {d110 > 0.0 && d200 > 0.0 && d200 >= d110,
          "W1(2,110)=" + fmt(d110) + " W1(2,200)=" + fmt(d200)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::pair<std::string, std::function<Outcome()>>>>
      criteria = {
          {"c01", {"gradient correctness", c01_gradients}},
          {"c02", {"encoding round-trip", c02_encoding}},
          {"c03", {"environment invariants", c03_environments}},
          {"c04", {"exact-oracle NashConv", c04_exact_nashconv}},
          {"c05", {"small-scale taxi PPO-Naive vs PAPO", c05_taxi_small_scale}},
          {"c06", {"CKA properties", c06_cka}},
          {"c07", {"curve-fit oracle", c07_curve_fit}},
          {"c08", {"initialization entropy", c08_init_entropy}},
          {"c09", {"GAE oracle", c09_gae}},
          {"c10", {"reproducibility", c10_reproducibility}},
          {"c11", {"parameter parity", c11_parity}},
          {"c12", {"reward-distribution shift", c12_reward_shift}},
      };
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--work-dir" && i + 1 < argc) {
      g_work_dir = argv[++i];
    } else {
      selected.push_back(arg);
    }
  }
  bool all_pass = true;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all_pass = all_pass && outcome.pass;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << id << ' ' << entry.first << ": "
              << outcome.detail << " [" << fmt(seconds) << " s]" << std::endl;
  }
  return all_pass ? 0 : 1;
}
