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

#include "papo/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <ostream>

#include <unsupported/Eigen/NonLinearOptimization>

#include "papo/checkpoint.hpp"
#include "papo/config_file.hpp"
#include "papo/policy.hpp"
#include "papo/rollout.hpp"
#include "papo/stats.hpp"

namespace papo {

namespace {

ProbeBatch make_probe(const Game& game, std::vector<AgentState> states) {
  ProbeBatch probe;
  probe.states = std::move(states);
  probe.observations =
      Matrix<float>::Zero(static_cast<Index>(probe.states.size()), game.observation_width());
  for (std::size_t i = 0; i < probe.states.size(); ++i) {
    game.write_observation(probe.states[i], probe.observations.row(Index(i)));
  }
  probe.checksum = fnv1a(probe.observations.data(),
                         sizeof(float) * probe.observations.size());
  return probe;
}

std::string format_float(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ProbeBatch sample_probe_batch(const Game& game, int m, std::uint64_t seed) {
  if (m < 1) throw DomainError("probe batch size must be positive");
  Rng rng(derive_seed(seed, 0x50524f4245ULL));
  std::vector<AgentState> states(m);
  for (auto& s : states) {
    s.t = static_cast<int>(uniform_int(rng, game.horizon()));
    s.cell = static_cast<int>(uniform_int(rng, game.state_count()));
  }
  return make_probe(game, std::move(states));
}

ProbeBatch full_probe_batch(const Game& game) {
  std::vector<AgentState> states;
  for (int t = 0; t < game.horizon(); ++t) {
    for (int s = 0; s < game.state_count(); ++s) states.push_back({s, t});
  }
  return make_probe(game, std::move(states));
}

CkaCurve cka_curve(const ActorCritic<float>& model, const Game& game,
                   const std::vector<int>& populations, int step, int m,
                   std::uint64_t seed) {
  if (!is_hyper(model.kind())) {
    throw ConfigError("CKA curves need a hypernetwork architecture (hyperppo or "
                      "papo); other architectures require one checkpoint per N");
  }
  if (step < 1) throw ConfigError("CKA step must be positive");
  const ProbeBatch probe = sample_probe_batch(game, m, seed);
  CkaCurve curve;
  curve.probe_checksum = probe.checksum;
  for (int n : populations) {
    CkaRow row;
    row.population = n;
    row.next_population = n + step;
    const LayerTaps<float> a = model.actor().bind(n).taps(probe.observations);
    const LayerTaps<float> b = model.actor().bind(n + step).taps(probe.observations);
    for (int l = 0; l < kPolicyLayers; ++l) {
      try {
        row.rho[l] = linear_cka(a[l], b[l]);
      } catch (const DegenerateInputError&) {
        row.rho[l] = NAN;
        row.degenerate = true;
      }
    }
    curve.rows.push_back(row);
  }
  return curve;
}

std::string to_string(FitForm form) {
  return form == FitForm::kSimple ? "simple" : "general";
}

FitForm parse_fit_form(const std::string& name) {
  if (name == "simple") return FitForm::kSimple;
  if (name == "general") return FitForm::kGeneral;
  throw ConfigError("unknown fit form '" + name + "' (expected simple or general)");
}

double scaling_law(FitForm form, std::span<const double> p, double n) {
  if (form == FitForm::kSimple) return 1.0 - p[0] / std::pow(n, p[1]);
  return 1.0 - p[0] / (p[2] * std::pow(n, p[1]) + p[3]);
}

namespace {

struct LawFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  FitForm form;
  std::span<const double> n;
  std::span<const double> rho;

  int inputs() const { return form == FitForm::kSimple ? 2 : 4; }
  int values() const { return static_cast<int>(n.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < n.size(); ++i) {
      f(i) = scaling_law(form, std::span<const double>(x.data(), x.size()), n[i]) - rho[i];
      if (!std::isfinite(f(i))) f(i) = 1e150;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    const double a = x(0), b = x(1);
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double nb = std::pow(n[i], b);
      const double ln = std::log(n[i]);
      if (form == FitForm::kSimple) {
        j(i, 0) = -1.0 / nb;
        j(i, 1) = a * ln / nb;
      } else {
        const double c = x(2), d = x(3);
        const double den = c * nb + d;
        const double den2 = den * den;
        j(i, 0) = -1.0 / den;
        j(i, 1) = a * c * nb * ln / den2;
        j(i, 2) = a * nb / den2;
        j(i, 3) = a / den2;
      }
    }
    if (!j.allFinite()) j = j.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });
    return 0;
  }
};

bool lm_succeeded(Eigen::LevenbergMarquardtSpace::Status status) {
  using namespace Eigen::LevenbergMarquardtSpace;
  return status != ImproperInputParameters && status != TooManyFunctionEvaluation &&
         status != NotStarted && status != Running && status != UserAsked;
}

}  // namespace

FitResult fit_scaling_law(std::span<const double> n, std::span<const double> rho,
                          FitForm form) {
  const int params = form == FitForm::kSimple ? 2 : 4;
  if (n.size() != rho.size()) throw DimensionError("fit: N and rho lengths differ");
  if (static_cast<int>(n.size()) < params + 2) {
    throw DomainError("fit: need at least " + std::to_string(params + 2) + " points");
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !std::isfinite(rho[i])) {
      throw DomainError("fit: N must be positive and rho finite");
    }
  }
  LawFunctor functor{form, n, rho};
  static constexpr double kStarts[4] = {0.25, 0.5, 1.0, 2.0};
  double best_norm = std::numeric_limits<double>::infinity();
  double best_any = best_norm;
  Eigen::VectorXd best;
  int best_start = -1;
  for (int s = 0; s < 4; ++s) {
    const double b0 = kStarts[s];
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double x = std::pow(n[i], -b0);
      sxy += x * (1.0 - rho[i]);
      sxx += x * x;
    }
    Eigen::VectorXd x(params);
    x(0) = sxy / sxx;
    x(1) = b0;
    if (form == FitForm::kGeneral) {
      x(2) = 1.0;
      x(3) = 0.0;
    }
    Eigen::LevenbergMarquardt<LawFunctor> lm(functor);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = 4000;
    const auto status = lm.minimize(x);
    Eigen::VectorXd f(n.size());
    functor(x, f);
    const double norm = f.norm();
    if (!x.allFinite()) continue;
    best_any = std::min(best_any, norm);
    if (lm_succeeded(status) && norm < best_norm) {
      best_norm = norm;
      best = x;
      best_start = s;
    }
  }
  if (best_start < 0) throw FitFailure("scaling-law fit did not converge", best_any);

  FitResult out;
  out.form = form;
  out.names = form == FitForm::kSimple ? std::vector<std::string>{"a", "b"}
                                       : std::vector<std::string>{"a", "b", "c", "d"};
  out.estimates.assign(best.data(), best.data() + params);
  out.residual_norm = best_norm;
  out.dof = static_cast<int>(n.size()) - params;
  out.start_b_index = best_start;

  Eigen::MatrixXd j(n.size(), params);
  functor.df(best, j);
  double max_rho = 0.0;
  for (double r : rho) max_rho = std::max(max_rho, std::abs(r));
  const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) * max_rho;
  const double s2 = std::max(best_norm * best_norm / out.dof, floor * floor);

  const Eigen::VectorXd scale = j.colwise().norm();
  std::vector<int> active;
  for (int k = 0; k < params; ++k) {
    if (scale(k) > 0.0) active.push_back(k);
  }
  out.standard_errors.assign(params, std::numeric_limits<double>::infinity());
  if (!active.empty()) {
    Eigen::MatrixXd js(n.size(), active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      js.col(k) = j.col(active[k]) / scale(active[k]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(js, Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const Eigen::MatrixXd& v = svd.matrixV();
    const double tol = 1e-10 * sv(0);
    std::vector<bool> in_null(active.size(), false);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(active.size(), active.size());
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) <= tol) {
        for (std::size_t k = 0; k < active.size(); ++k) {
          if (std::abs(v(k, i)) > 1e-6) in_null[k] = true;
        }
      } else {
        cov += v.col(i) * v.col(i).transpose() / (sv(i) * sv(i));
      }
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (in_null[k]) continue;
      const double var = s2 * cov(k, k) / (scale(active[k]) * scale(active[k]));
      out.standard_errors[active[k]] = std::sqrt(var);
    }
  }
  for (int k = 0; k < params; ++k) {
    const double se = out.standard_errors[k];
    const double t = std::isinf(se) ? 0.0 : out.estimates[k] / se;
    out.t_values.push_back(t);
    out.p_values.push_back(std::isinf(se) ? 1.0 : student_t_two_sided_p(t, out.dof));
  }
  return out;
}

double kl_to_uniform(const Matrix<double>& p) {
  if (p.rows() == 0) throw DomainError("kl_to_uniform: no probe rows");
  const double actions = static_cast<double>(p.cols());
  double total = 0.0;
  for (Index r = 0; r < p.rows(); ++r) {
    for (Index a = 0; a < p.cols(); ++a) {
      const double v = p(r, a);
      if (v > 0.0) total += v * std::log(v * actions);
    }
  }
  return std::max(0.0, total / p.rows());
}

std::vector<KlRow> kl_table(const ActorCritic<float>& model, const Game& game,
                            const std::vector<int>& populations,
                            const Matrix<float>& probe) {
  (void)game;
  std::vector<KlRow> rows;
  for (int n : populations) {
    const Matrix<double> p =
        softmax_rows(model.actor().forward(probe, n).cast<double>());
    rows.push_back({n, kl_to_uniform(p)});
  }
  return rows;
}

RewardHistogram reward_distribution(const Game& game, int population,
                                    long long trajectories, std::uint64_t seed,
                                    double bin_width) {
  if (trajectories < 1) throw DomainError("need at least one trajectory");
  if (!(bin_width > 0.0)) throw DomainError("bin width must be positive");
  TabularPolicy uniform = TabularPolicy::uniform(game);
  Rng rng(derive_seed(seed, 0x5245570000ULL + population));
  RewardHistogram h;
  h.population = population;
  h.bin_width = bin_width;
  EpisodeTrace trace;
  for (long long k = 0; k < trajectories; ++k) {
    run_episode(game, population, uniform, uniform, rng, &trace);
    for (double r : trace.rewards) {
      if (r < 0.0) throw DomainError("negative reward outside the histogram range");
      h.samples.push_back(r);
      const auto bin = static_cast<std::size_t>(std::floor(r / bin_width));
      if (bin >= h.counts.size()) h.counts.resize(bin + 1, 0);
      ++h.counts[bin];
      ++h.total;
    }
  }
  return h;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> all(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), all.begin());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = all.front();
  double w = 0.0;
  for (double x : all) {
    w += std::abs(i / na - j / nb) * (x - prev);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    prev = x;
  }
  return w;
}

double wasserstein1(const RewardHistogram& a, const RewardHistogram& b) {
  return wasserstein1(a.samples, b.samples);
}

void write_cka_csv(std::ostream& out, const CkaCurve& curve) {
  out << "N,N_next,rho_input,rho_hidden,rho_output,degenerate,probe_checksum\n";
  for (const auto& r : curve.rows) {
    out << r.population << ',' << r.next_population;
    for (double v : r.rho) out << ',' << (std::isnan(v) ? "nan" : format_double(v));
    out << ',' << (r.degenerate ? 1 : 0) << ',' << curve.probe_checksum << '\n';
  }
}

void write_fit_csv(std::ostream& out, const std::string& layer, const FitResult& fit,
                   bool header) {
  if (header) out << "layer,form,parameter,estimate,se,t,p,residual_norm,dof\n";
  for (std::size_t k = 0; k < fit.names.size(); ++k) {
    out << layer << ',' << to_string(fit.form) << ',' << fit.names[k] << ','
        << format_double(fit.estimates[k]) << ','
        << (std::isinf(fit.standard_errors[k]) ? "inf"
                                               : format_double(fit.standard_errors[k]))
        << ',' << format_double(fit.t_values[k]) << ',' << format_double(fit.p_values[k])
        << ',' << format_double(fit.residual_norm) << ',' << fit.dof << '\n';
  }
}

void write_kl_csv(std::ostream& out, const std::string& encoding,
                  const std::vector<KlRow>& rows, bool header) {
  if (header) out << "encoding,N,kappa\n";
  for (const auto& r : rows) {
    out << encoding << ',' << r.population << ',' << format_double(r.kappa) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const RewardHistogram& h) {
  out << "N,bin_start,bin_end,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << h.population << ',' << format_double(h.bin_start(k)) << ','
        << format_double(h.bin_start(k + 1)) << ',' << h.counts[k] << '\n';
  }
}

void export_activations(std::ostream& out, const ActorCritic<float>& model,
                        const Game& game, const std::vector<AgentState>& states,
                        const std::vector<int>& populations) {
  out << "N,state_id,t,cell,layer,values\n";
  if (states.empty()) return;
  Matrix<float> obs(static_cast<Index>(states.size()), game.observation_width());
  for (std::size_t i = 0; i < states.size(); ++i) {
    game.write_observation(states[i], obs.row(Index(i)));
  }
  static constexpr const char* kLayers[3] = {"input", "hidden", "output"};
  for (int n : populations) {
    const LayerTaps<float> taps = model.actor().bind(n).taps(obs);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const long long id =
          static_cast<long long>(states[i].t) * game.state_count() + states[i].cell;
      for (int l = 0; l < kPolicyLayers; ++l) {
        out << n << ',' << id << ',' << states[i].t << ',' << states[i].cell << ','
            << kLayers[l] << ',';
        for (Index c = 0; c < taps[l].cols(); ++c) {
          if (c) out << ' ';
          out << format_float(taps[l](Index(i), c));
        }
        out << '\n';
      }
    }
  }
}

}  // namespace papo
