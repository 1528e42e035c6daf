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

#include "papo/policy_zoo.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "papo/errors.hpp"

namespace papo {

std::string to_string(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::kPPO: return "ppo";
    case ArchitectureKind::kPPOLarge: return "ppo-large";
    case ArchitectureKind::kAugPPO: return "augppo";
    case ArchitectureKind::kAugPPOLarge: return "augppo-large";
    case ArchitectureKind::kHyperPPO: return "hyperppo";
    case ArchitectureKind::kPAPO: return "papo";
  }
  return "unknown";
}

ArchitectureKind parse_architecture_kind(const std::string& name) {
  for (ArchitectureKind kind : kAllArchitectures) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown architecture '" + name +
                    "' (expected ppo, ppo-large, augppo, augppo-large, "
                    "hyperppo or papo)");
}

bool is_hyper(ArchitectureKind kind) {
  return kind == ArchitectureKind::kHyperPPO || kind == ArchitectureKind::kPAPO;
}

bool is_population_aware(ArchitectureKind kind) {
  return kind != ArchitectureKind::kPPO && kind != ArchitectureKind::kPPOLarge;
}

std::array<std::pair<int, int>, kPolicyLayers> NetworkLayout::layer_shapes() const {
  return {{{policy_input_width(), hidden[0]},
           {hidden[0], hidden[1]},
           {hidden[1], output_width}}};
}

long long NetworkLayout::parameter_count() const {
  long long total = 0;
  if (embedded()) {
    total += static_cast<long long>(feature_width()) * embedding_width + embedding_width;
  }
  const auto shapes = layer_shapes();
  if (!hyper) {
    for (const auto& [in, out] : shapes) {
      total += static_cast<long long>(in) * out + 2LL * out;
    }
    return total;
  }
  total += static_cast<long long>(embedding_width) * trunk[0] + trunk[0];
  total += static_cast<long long>(trunk[0]) * trunk[1] + trunk[1];
  const long long rows = trunk[1] + 1;
  for (const auto& [in, out] : shapes) {
    total += rows * (static_cast<long long>(in) * out + 2LL * out);
  }
  return total;
}

std::array<int, 2> default_trunk(EnvKind env) {
  if (env == EnvKind::kTaxiMatching) return {128, 74};
  return {128, 128};
}

namespace {

NetworkLayout base_layout(const GameConfig& game, const ModelOptions& options,
                          int output_width) {
  NetworkLayout layout;
  layout.observation_width = game.state_count() + 1;
  layout.output_width = output_width;
  layout.encoding = options.encoding;
  layout.encoding_bits = options.encoding_bits;
  layout.embedding_width = options.embedding_width;
  layout.hidden = options.hidden;
  layout.trunk = options.trunk[0] > 0 ? options.trunk : default_trunk(game.env_kind);
  return layout;
}

void configure(ArchitectureKind kind, NetworkLayout& layout) {
  layout.augment = kind == ArchitectureKind::kAugPPO ||
                   kind == ArchitectureKind::kAugPPOLarge ||
                   kind == ArchitectureKind::kPAPO;
  layout.hyper = is_hyper(kind);
}

// Smallest-error integer width in [1, 1 << 16] for a monotone count.
int solve_width(const std::function<long long(int)>& count, long long target) {
  int lo = 1, hi = 1 << 16;
  if (count(hi) < target) return hi;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (count(mid) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo > 1 && target - count(lo - 1) < count(lo) - target) return lo - 1;
  return lo;
}

}  // namespace

ArchitectureSpec resolve_architecture(ArchitectureKind kind, const GameConfig& game,
                                      const ModelOptions& options) {
  game.validate();
  if (options.embedding_width <= 0 || options.hidden[0] <= 0 ||
      options.hidden[1] <= 0 || options.trunk[0] < 0 || options.trunk[1] < 0) {
    throw ConfigError("layer widths must be positive");
  }
  if (options.encoding == EncodingKind::kBinary &&
      (options.encoding_bits < 1 || options.encoding_bits > 62)) {
    throw ConfigError("encoding_bits must lie in [1, 62]");
  }
  ArchitectureSpec spec;
  spec.kind = kind;
  spec.actor = base_layout(game, options, game.action_count());
  spec.critic = base_layout(game, options, 1);
  configure(kind, spec.actor);
  configure(kind, spec.critic);

  if (kind == ArchitectureKind::kPAPO || kind == ArchitectureKind::kPPO ||
      kind == ArchitectureKind::kAugPPO) {
    return spec;
  }

  const ArchitectureSpec reference =
      resolve_architecture(ArchitectureKind::kPAPO, game, options);
  const long long target = reference.parameter_count();
  std::function<long long(int)> count;
  std::function<void(int)> apply;
  if (kind == ArchitectureKind::kHyperPPO) {
    apply = [&spec](int w) {
      spec.actor.trunk[1] = w;
      spec.critic.trunk[1] = w;
    };
  } else {
    apply = [&spec](int w) {
      spec.actor.hidden = {w, w};
      spec.critic.hidden = {w, w};
    };
  }
  count = [&spec, &apply](int w) {
    apply(w);
    return spec.parameter_count();
  };
  const int width = solve_width(count, target);
  apply(width);
  const double deviation =
      std::abs(static_cast<double>(spec.parameter_count() - target)) / target;
  if (deviation > options.parity_tolerance) {
    std::ostringstream msg;
    msg << to_string(kind) << ": no width reaches " << target
        << " parameters within " << options.parity_tolerance * 100 << "%";
    throw ConfigError(msg.str());
  }
  return spec;
}

// ---------------------------------------------------------------------------

template <typename Scalar>
Matrix<Scalar> BoundNetwork<Scalar>::input(const Matrix<Scalar>& obs) const {
  if (!augment_) return obs;
  Matrix<Scalar> out(obs.rows(), obs.cols() + embedding_.cols());
  out.leftCols(obs.cols()) = obs;
  out.rightCols(embedding_.cols()) = embedding_.replicate(obs.rows(), 1);
  return out;
}

namespace {

template <typename Scalar>
Matrix<Scalar> uniform_matrix(Index rows, Index cols, double bound, Rng& rng) {
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(bound * (2.0 * uniform01(rng) - 1.0));
  }
  return m;
}

template <typename Scalar>
Matrix<Scalar> features_row(const NetworkLayout& layout, int population) {
  const Eigen::VectorXd f =
      population_features(layout.encoding, population, layout.encoding_bits);
  return f.transpose().cast<Scalar>();
}

}  // namespace

template <typename Scalar>
Parameter<Scalar>& PolicyNetwork<Scalar>::make(ParameterStore<Scalar>& store,
                                               const std::string& name,
                                               Matrix<Scalar> value) {
  return store.add(name, std::move(value));
}

template <typename Scalar>
PolicyNetwork<Scalar>::PolicyNetwork(const NetworkLayout& layout,
                                     ParameterStore<Scalar>& store,
                                     const std::string& prefix,
                                     const ModelOptions& options, Rng& rng)
    : layout_(layout) {
  const auto shapes = layout.layer_shapes();
  auto base_bound = [&](int l) {
    const double b = 1.0 / std::sqrt(static_cast<double>(shapes[l].first));
    return l == kPolicyLayers - 1 ? b * options.output_init_scale : b;
  };
  if (layout.embedded()) {
    const int f = layout.feature_width();
    embedding_w_ = &make(store, prefix + "/embedding/w",
                         uniform_matrix<Scalar>(f, layout.embedding_width,
                                                1.0 / std::sqrt(double(f)), rng));
    embedding_b_ = &make(store, prefix + "/embedding/b",
                         Matrix<Scalar>::Zero(1, layout.embedding_width));
  }
  if (!layout.hyper) {
    for (int l = 0; l < kPolicyLayers; ++l) {
      const auto [in, out] = shapes[l];
      const std::string p = prefix + "/layer" + std::to_string(l);
      direct_[l][0] = &make(store, p + "/w",
                            uniform_matrix<Scalar>(in, out, base_bound(l), rng));
      direct_[l][1] = &make(store, p + "/b", Matrix<Scalar>::Zero(1, out));
      direct_[l][2] = &make(store, p + "/g", Matrix<Scalar>::Zero(1, out));
    }
    return;
  }
  int in = layout.embedding_width;
  for (int j = 0; j < 2; ++j) {
    const int out = layout.trunk[j];
    const std::string p = prefix + "/trunk" + std::to_string(j);
    trunk_w_[j] = &make(store, p + "/w",
                        uniform_matrix<Scalar>(in, out, 1.0 / std::sqrt(double(in)), rng));
    trunk_b_[j] = &make(store, p + "/b", Matrix<Scalar>::Zero(1, out));
    in = out;
  }
  const int z = layout.trunk[1];
  const double head = options.head_init_scale / std::sqrt(static_cast<double>(z));
  static constexpr const char* kTargets[3] = {"w", "b", "g"};
  for (int l = 0; l < kPolicyLayers; ++l) {
    const auto [lin, lout] = shapes[l];
    const double base = base_bound(l);
    const double tail = l == kPolicyLayers - 1 ? options.output_init_scale : 1.0;
    for (int k = 0; k < 3; ++k) {
      const Index width = k == 0 ? Index(lin) * lout : lout;
      const std::string p =
          prefix + "/head" + std::to_string(l) + "/" + kTargets[k];
      const double scale = k == 0 ? head * base : head * tail;
      head_w_[l][k] = &make(store, p + "/w", uniform_matrix<Scalar>(z, width, scale, rng));
      head_b_[l][k] = &make(store, p + "/b",
                            k == 0 ? uniform_matrix<Scalar>(1, width, base, rng)
                                   : Matrix<Scalar>::Zero(1, width));
    }
  }
}

template <typename Scalar>
Matrix<Scalar> PolicyNetwork<Scalar>::embedding(int population) const {
  if (!layout_.embedded()) {
    throw ContractError("network has no population embedding");
  }
  Matrix<Scalar> e = features_row<Scalar>(layout_, population) * embedding_w_->value;
  e += embedding_b_->value;
  return e;
}

template <typename Scalar>
ParamSet<Scalar> PolicyNetwork<Scalar>::generate_from_embedding(
    const Matrix<Scalar>& emb) const {
  if (!layout_.hyper) throw ContractError("network has no hypernetwork");
  if (emb.rows() != 1 || emb.cols() != layout_.embedding_width) {
    throw DimensionError("embedding must be 1 x " +
                         std::to_string(layout_.embedding_width));
  }
  Matrix<Scalar> z = emb;
  for (int j = 0; j < 2; ++j) {
    Matrix<Scalar> next = z * trunk_w_[j]->value;
    next += trunk_b_[j]->value;
    z = next.cwiseMax(Scalar(0));
  }
  const auto shapes = layout_.layer_shapes();
  ParamSet<Scalar> params;
  for (int l = 0; l < kPolicyLayers; ++l) {
    const auto [in, out] = shapes[l];
    Matrix<Scalar> flat = z * head_w_[l][0]->value;
    flat += head_b_[l][0]->value;
    params.layers[l].w = Eigen::Map<const Matrix<Scalar>>(flat.data(), in, out);
    params.layers[l].b = z * head_w_[l][1]->value + head_b_[l][1]->value;
    params.layers[l].g = z * head_w_[l][2]->value + head_b_[l][2]->value;
  }
  return params;
}

template <typename Scalar>
ParamSet<Scalar> PolicyNetwork<Scalar>::generate(int population) const {
  if (layout_.hyper) return generate_from_embedding(embedding(population));
  ParamSet<Scalar> params;
  for (int l = 0; l < kPolicyLayers; ++l) {
    params.layers[l] = {direct_[l][0]->value, direct_[l][1]->value,
                        direct_[l][2]->value};
  }
  return params;
}

template <typename Scalar>
Matrix<Scalar> PolicyNetwork<Scalar>::trunk_output(int population) const {
  if (!layout_.hyper) throw ContractError("network has no hypernetwork");
  Matrix<Scalar> z = embedding(population);
  for (int j = 0; j < 2; ++j) {
    Matrix<Scalar> next = z * trunk_w_[j]->value;
    next += trunk_b_[j]->value;
    z = next.cwiseMax(Scalar(0));
  }
  return z;
}

template <typename Scalar>
BoundNetwork<Scalar> PolicyNetwork<Scalar>::bind(int population) const {
  Matrix<Scalar> emb;
  if (layout_.embedded()) emb = embedding(population);
  if (layout_.hyper) {
    auto owned = std::make_shared<const ParamSet<Scalar>>(generate_from_embedding(emb));
    const LayerViews<Scalar> v = views(*owned);
    return BoundNetwork<Scalar>(std::move(owned), v, std::move(emb), layout_.augment);
  }
  LayerViews<Scalar> v;
  for (int l = 0; l < kPolicyLayers; ++l) {
    v[l] = {&direct_[l][0]->value, &direct_[l][1]->value, &direct_[l][2]->value};
  }
  return BoundNetwork<Scalar>(nullptr, v, std::move(emb), layout_.augment);
}

template <typename Scalar>
Var<Scalar> PolicyNetwork<Scalar>::forward(Tape<Scalar>& tape, const Matrix<Scalar>& obs,
                                           std::span<const PopulationGroup> groups) const {
  if (obs.cols() != layout_.observation_width) {
    throw DimensionError("observation width " + std::to_string(obs.cols()) +
                         ", network expects " +
                         std::to_string(layout_.observation_width));
  }
  Index covered = 0;
  for (const auto& g : groups) {
    if (g.begin != covered || g.count <= 0) {
      throw ContractError("population groups must tile the batch in order");
    }
    covered += g.count;
  }
  if (covered != obs.rows()) {
    throw ContractError("population groups do not cover the batch");
  }
  const Index n_groups = static_cast<Index>(groups.size());

  Var<Scalar> emb;
  if (layout_.embedded()) {
    Matrix<Scalar> feats(n_groups, layout_.feature_width());
    for (Index i = 0; i < n_groups; ++i) {
      feats.row(i) = features_row<Scalar>(layout_, groups[i].population);
    }
    emb = add(matmul(tape.constant(std::move(feats)), tape.parameter(*embedding_w_)),
              tape.parameter(*embedding_b_));
  }

  if (!layout_.hyper) {
    std::array<LayerVars<Scalar>, kPolicyLayers> layers;
    for (int l = 0; l < kPolicyLayers; ++l) {
      layers[l] = {tape.parameter(*direct_[l][0]), tape.parameter(*direct_[l][1]),
                   tape.parameter(*direct_[l][2])};
    }
    Var<Scalar> x = tape.constant(obs);
    if (layout_.augment) {
      std::vector<Var<Scalar>> parts;
      for (Index i = 0; i < n_groups; ++i) {
        parts.push_back(repeat_rows(row(emb, i), groups[i].count));
      }
      x = concat_cols(x, n_groups == 1 ? parts.front()
                                       : concat_rows<Scalar>(parts));
    }
    return mlp_forward(layers, x);
  }

  Var<Scalar> z = emb;
  for (int j = 0; j < 2; ++j) {
    z = relu(add(matmul(z, tape.parameter(*trunk_w_[j])), tape.parameter(*trunk_b_[j])));
  }
  // One GEMM per head target covers every population in the batch.
  std::array<std::array<Var<Scalar>, 3>, kPolicyLayers> generated;
  for (int l = 0; l < kPolicyLayers; ++l) {
    for (int k = 0; k < 3; ++k) {
      generated[l][k] = add(matmul(z, tape.parameter(*head_w_[l][k])),
                            tape.parameter(*head_b_[l][k]));
    }
  }
  const auto shapes = layout_.layer_shapes();
  std::vector<Var<Scalar>> outputs;
  for (Index i = 0; i < n_groups; ++i) {
    std::array<LayerVars<Scalar>, kPolicyLayers> layers;
    for (int l = 0; l < kPolicyLayers; ++l) {
      Var<Scalar> w = n_groups == 1 ? generated[l][0] : row(generated[l][0], i);
      Var<Scalar> b = n_groups == 1 ? generated[l][1] : row(generated[l][1], i);
      Var<Scalar> g = n_groups == 1 ? generated[l][2] : row(generated[l][2], i);
      layers[l] = {reshape(w, shapes[l].first, shapes[l].second), b, g};
    }
    Var<Scalar> x = tape.constant(obs.middleRows(groups[i].begin, groups[i].count));
    if (layout_.augment) {
      Var<Scalar> e = n_groups == 1 ? emb : row(emb, i);
      x = concat_cols(x, repeat_rows(e, groups[i].count));
    }
    outputs.push_back(mlp_forward(layers, x));
  }
  if (outputs.size() == 1) return outputs.front();
  return concat_rows<Scalar>(outputs);
}

// ---------------------------------------------------------------------------

template <typename Scalar>
ActorCritic<Scalar> ActorCritic<Scalar>::build(ArchitectureKind kind,
                                               const GameConfig& game,
                                               const ModelOptions& options,
                                               std::uint64_t seed) {
  return from_spec(resolve_architecture(kind, game, options), options, seed);
}

template <typename Scalar>
ActorCritic<Scalar> ActorCritic<Scalar>::from_spec(const ArchitectureSpec& spec,
                                                   const ModelOptions& options,
                                                   std::uint64_t seed) {
  ActorCritic ac;
  ac.spec_ = spec;
  ac.options_ = options;
  ac.actor_store_ = std::make_unique<ParameterStore<Scalar>>();
  ac.critic_store_ = std::make_unique<ParameterStore<Scalar>>();
  Rng actor_rng(derive_seed(seed, 1));
  Rng critic_rng(derive_seed(seed, 2));
  ac.actor_ = std::make_unique<PolicyNetwork<Scalar>>(spec.actor, *ac.actor_store_,
                                                      "actor", options, actor_rng);
  ac.critic_ = std::make_unique<PolicyNetwork<Scalar>>(
      spec.critic, *ac.critic_store_, "critic", options, critic_rng);
  return ac;
}

template <typename Scalar>
ActorCritic<Scalar> ActorCritic<Scalar>::clone() const {
  ActorCritic copy = from_spec(spec_, options_, 0);
  for (std::size_t i = 0; i < actor_store_->size(); ++i) {
    (*copy.actor_store_)[i].value = (*actor_store_)[i].value;
  }
  for (std::size_t i = 0; i < critic_store_->size(); ++i) {
    (*copy.critic_store_)[i].value = (*critic_store_)[i].value;
  }
  return copy;
}

namespace {

void write_layout(const NetworkLayout& layout, const std::string& prefix,
                  std::map<std::string, std::string>& d) {
  d[prefix + ".observation_width"] = std::to_string(layout.observation_width);
  d[prefix + ".output_width"] = std::to_string(layout.output_width);
  d[prefix + ".augment"] = layout.augment ? "1" : "0";
  d[prefix + ".hyper"] = layout.hyper ? "1" : "0";
  d[prefix + ".encoding"] = to_string(layout.encoding);
  d[prefix + ".encoding_bits"] = std::to_string(layout.encoding_bits);
  d[prefix + ".embedding_width"] = std::to_string(layout.embedding_width);
  d[prefix + ".hidden"] = format_int_list({layout.hidden[0], layout.hidden[1]});
  d[prefix + ".trunk"] = format_int_list({layout.trunk[0], layout.trunk[1]});
}

int to_int(const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw IoError("bad integer '" + text + "'");
    return v;
  } catch (const std::logic_error&) {
    throw IoError("bad integer '" + text + "'");
  }
}

std::array<int, 2> to_pair(const std::string& text) {
  const std::vector<int> v = parse_int_list(text);
  if (v.size() != 2) throw IoError("expected two widths, got '" + text + "'");
  return {v[0], v[1]};
}

NetworkLayout read_layout(const Checkpoint& c, const std::string& prefix) {
  NetworkLayout layout;
  layout.observation_width = to_int(c.descriptor_value(prefix + ".observation_width"));
  layout.output_width = to_int(c.descriptor_value(prefix + ".output_width"));
  layout.augment = c.descriptor_value(prefix + ".augment") == "1";
  layout.hyper = c.descriptor_value(prefix + ".hyper") == "1";
  layout.encoding = parse_encoding_kind(c.descriptor_value(prefix + ".encoding"));
  layout.encoding_bits = to_int(c.descriptor_value(prefix + ".encoding_bits"));
  layout.embedding_width = to_int(c.descriptor_value(prefix + ".embedding_width"));
  layout.hidden = to_pair(c.descriptor_value(prefix + ".hidden"));
  layout.trunk = to_pair(c.descriptor_value(prefix + ".trunk"));
  return layout;
}

}  // namespace

template <typename Scalar>
Checkpoint ActorCritic<Scalar>::to_checkpoint() const {
  Checkpoint c;
  c.descriptor["architecture"] = to_string(spec_.kind);
  write_layout(spec_.actor, "actor", c.descriptor);
  write_layout(spec_.critic, "critic", c.descriptor);
  for (const auto* store : {actor_store_.get(), critic_store_.get()}) {
    for (std::size_t i = 0; i < store->size(); ++i) {
      c.add((*store)[i].name, (*store)[i].value);
    }
  }
  return c;
}

template <typename Scalar>
void ActorCritic<Scalar>::load_parameters(const Checkpoint& checkpoint) {
  for (auto* store : {actor_store_.get(), critic_store_.get()}) {
    for (std::size_t i = 0; i < store->size(); ++i) {
      auto& p = (*store)[i];
      p.value = checkpoint.get<Scalar>(p.name, p.value.rows(), p.value.cols());
    }
  }
}

template <typename Scalar>
ActorCritic<Scalar> ActorCritic<Scalar>::from_checkpoint(const Checkpoint& checkpoint) {
  ArchitectureSpec spec;
  try {
    spec.kind = parse_architecture_kind(checkpoint.descriptor_value("architecture"));
  } catch (const ConfigError& e) {
    throw IoError(e.what());
  }
  spec.actor = read_layout(checkpoint, "actor");
  spec.critic = read_layout(checkpoint, "critic");
  ModelOptions options;
  options.encoding = spec.actor.encoding;
  options.encoding_bits = spec.actor.encoding_bits;
  options.embedding_width = spec.actor.embedding_width;
  options.hidden = spec.actor.hidden;
  options.trunk = spec.actor.trunk;
  ActorCritic ac = from_spec(spec, options, 0);
  ac.load_parameters(checkpoint);
  return ac;
}

template <typename Scalar>
std::uint64_t ActorCritic<Scalar>::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto* store : {actor_store_.get(), critic_store_.get()}) {
    for (std::size_t i = 0; i < store->size(); ++i) {
      const auto& v = (*store)[i].value;
      h = fnv1a(v.data(), sizeof(Scalar) * v.size(), h);
    }
  }
  return h;
}

int sample_categorical(const double* probs, int n, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  int last = n - 1;
  for (int a = 0; a < n; ++a) {
    if (probs[a] <= 0.0) continue;
    cumulative += probs[a];
    last = a;
    if (u < cumulative) return a;
  }
  return last;
}

template <typename Scalar>
ActResult ActorCritic<Scalar>::act(const Vector<Scalar>& obs, int population,
                                   Rng& rng) const {
  const Matrix<Scalar> x = obs.transpose();
  const Matrix<Scalar> logits = actor_->forward(x, population);
  const Eigen::RowVectorXd z = logits.row(0).template cast<double>();
  const double m = z.maxCoeff();
  const Eigen::RowVectorXd e = (z.array() - m).exp().matrix();
  const double total = e.sum();
  const Eigen::RowVectorXd p = e / total;
  ActResult result;
  result.action = sample_categorical(p.data(), static_cast<int>(p.size()), rng);
  result.log_prob = z(result.action) - m - std::log(total);
  result.value = static_cast<double>(critic_->forward(x, population)(0, 0));
  return result;
}

void write_model_options(const ModelOptions& options, KeyValueConfig& config) {
  config.set("model.encoding", to_string(options.encoding));
  config.set("model.encoding_bits", std::to_string(options.encoding_bits));
  config.set("model.embedding_width", std::to_string(options.embedding_width));
  config.set("model.hidden", format_int_list({options.hidden[0], options.hidden[1]}));
  config.set("model.trunk", format_int_list({options.trunk[0], options.trunk[1]}));
  config.set("model.head_init_scale", format_double(options.head_init_scale));
  config.set("model.output_init_scale", format_double(options.output_init_scale));
  config.set("model.parity_tolerance", format_double(options.parity_tolerance));
}

ModelOptions model_options_from(const KeyValueConfig& config) {
  ModelOptions o;
  o.encoding = parse_encoding_kind(config.get_string("model.encoding", to_string(o.encoding)));
  o.encoding_bits = static_cast<int>(config.get_int("model.encoding_bits", o.encoding_bits));
  o.embedding_width =
      static_cast<int>(config.get_int("model.embedding_width", o.embedding_width));
  auto pair = [&](const std::string& key, std::array<int, 2> fallback) {
    const std::vector<int> v =
        config.get_int_list(key, {fallback[0], fallback[1]});
    if (v.size() != 2) throw ConfigError(key + " needs exactly two widths");
    return std::array<int, 2>{v[0], v[1]};
  };
  o.hidden = pair("model.hidden", o.hidden);
  o.trunk = pair("model.trunk", o.trunk);
  o.head_init_scale = config.get_double("model.head_init_scale", o.head_init_scale);
  o.output_init_scale = config.get_double("model.output_init_scale", o.output_init_scale);
  o.parity_tolerance = config.get_double("model.parity_tolerance", o.parity_tolerance);
  return o;
}

template class BoundNetwork<float>;
template class BoundNetwork<double>;
template class PolicyNetwork<float>;
template class PolicyNetwork<double>;
template class ActorCritic<float>;
template class ActorCritic<double>;

}  // namespace papo
