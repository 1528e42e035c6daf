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

// How generated policies change with N: layer-wise CKA between the policies
// for N and N + step, scaling-law fits of the CKA curve, KL divergence to the
// uniform policy, reward distributions and activation export.

#ifndef PAPO_ANALYSIS_HPP_
#define PAPO_ANALYSIS_HPP_

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "papo/envs.hpp"
#include "papo/errors.hpp"
#include "papo/policy_zoo.hpp"
#include "papo/types.hpp"

namespace papo {

// Linear CKA on column-centered activations:
//
//   ||Yc^T Xc||_F^2 / (||Xc^T Xc||_F ||Yc^T Yc||_F)
//
// Rows are samples. Throws DegenerateInputError when either matrix has no
// variance and DimensionError when row counts differ.
template <typename DX, typename DY>
double linear_cka(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (x.rows() != y.rows()) {
    throw DimensionError("linear_cka: row counts differ (" + std::to_string(x.rows()) +
                         " vs " + std::to_string(y.rows()) + ")");
  }
  if (x.rows() < 2) throw DegenerateInputError("linear_cka: need at least two rows");
  Eigen::MatrixXd xc = x.template cast<double>();
  Eigen::MatrixXd yc = y.template cast<double>();
  xc.rowwise() -= xc.colwise().mean();
  yc.rowwise() -= yc.colwise().mean();
  double cross, xx, yy;
  if (xc.cols() + yc.cols() <= 2 * xc.rows()) {
    cross = (yc.transpose() * xc).squaredNorm();
    xx = (xc.transpose() * xc).norm();
    yy = (yc.transpose() * yc).norm();
  } else {
    const Eigen::MatrixXd kx = xc * xc.transpose();
    const Eigen::MatrixXd ky = yc * yc.transpose();
    cross = (kx.array() * ky.array()).sum();
    xx = kx.norm();
    yy = ky.norm();
  }
  if (!(xx > 0.0) || !(yy > 0.0)) {
    throw DegenerateInputError("linear_cka: activations have zero variance");
  }
  return cross / (xx * yy);
}

// Observations at uniformly sampled (t, cell) pairs.
struct ProbeBatch {
  std::vector<AgentState> states;
  Matrix<float> observations;
  std::uint64_t checksum = 0;  // FNV-1a of the observation bytes
};

ProbeBatch sample_probe_batch(const Game& game, int m, std::uint64_t seed);
// Every (t, cell) pair, in t-major order.
ProbeBatch full_probe_batch(const Game& game);

struct CkaRow {
  int population = 0;
  int next_population = 0;
  std::array<double, 3> rho = {NAN, NAN, NAN};  // input, hidden, output layer
  bool degenerate = false;
};

struct CkaCurve {
  std::vector<CkaRow> rows;
  std::uint64_t probe_checksum = 0;
};

// Compares the actor's generated policies at N and N + step for every N in
// `populations`. Requires a hypernetwork architecture.
CkaCurve cka_curve(const ActorCritic<float>& model, const Game& game,
                   const std::vector<int>& populations, int step, int m,
                   std::uint64_t seed);

enum class FitForm { kSimple, kGeneral };

std::string to_string(FitForm form);
FitForm parse_fit_form(const std::string& name);

// rho(N) = 1 - a / N^b             (simple,  parameters a, b)
// rho(N) = 1 - a / (c N^b + d)     (general, parameters a, b, c, d)
double scaling_law(FitForm form, std::span<const double> params, double n);

struct FitResult {
  FitForm form = FitForm::kSimple;
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> standard_errors;  // +inf for unidentifiable parameters
  std::vector<double> t_values;
  std::vector<double> p_values;
  double residual_norm = 0.0;
  int dof = 0;
  int start_b_index = 0;  // multi-start that produced the estimate
};

// Levenberg-Marquardt least squares with starts b in {0.25, 0.5, 1, 2}.
// Standard errors come from s^2 (J^T J)^-1 at the optimum; parameters in the
// numerical null space of J get an infinite error and p = 1. p-values are
// two-sided t-tests against 0 with dof = n - p.
FitResult fit_scaling_law(std::span<const double> n, std::span<const double> rho,
                          FitForm form);

// kappa(N) = mean over probe rows of sum_a pi(a|s) log(pi(a|s) |A|).
double kl_to_uniform(const Matrix<double>& probabilities);

struct KlRow {
  int population = 0;
  double kappa = 0.0;
};

std::vector<KlRow> kl_table(const ActorCritic<float>& model, const Game& game,
                            const std::vector<int>& populations,
                            const Matrix<float>& probe);

// Histogram over [0, bins * width) of agent 0's per-step rewards.
struct RewardHistogram {
  int population = 0;
  double bin_width = 0.05;
  std::vector<long long> counts;
  long long total = 0;
  std::vector<double> samples;

  double bin_start(std::size_t k) const { return bin_width * k; }
};

// Rewards of agent 0 over `trajectories` episodes of the uniform-random policy.
RewardHistogram reward_distribution(const Game& game, int population,
                                    long long trajectories, std::uint64_t seed,
                                    double bin_width = 0.05);

// Earth mover's distance between the empirical reward samples.
double wasserstein1(const RewardHistogram& a, const RewardHistogram& b);
double wasserstein1(std::vector<double> a, std::vector<double> b);

void write_cka_csv(std::ostream& out, const CkaCurve& curve);
void write_fit_csv(std::ostream& out, const std::string& layer, const FitResult& fit,
                   bool header);
void write_kl_csv(std::ostream& out, const std::string& encoding,
                  const std::vector<KlRow>& rows, bool header);
void write_histogram_csv(std::ostream& out, const RewardHistogram& histogram);

// One row per (N, state, layer): N,state_id,t,cell,layer,values (space separated).
void export_activations(std::ostream& out, const ActorCritic<float>& model,
                        const Game& game, const std::vector<AgentState>& states,
                        const std::vector<int>& populations);

}  // namespace papo

#endif  // PAPO_ANALYSIS_HPP_
