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

#include "papo/pop_encoding.hpp"

#include "papo/errors.hpp"

namespace papo {

std::string to_string(EncodingKind kind) {
  return kind == EncodingKind::kBinary ? "be" : "re";
}

EncodingKind parse_encoding_kind(const std::string& name) {
  if (name == "be" || name == "binary") return EncodingKind::kBinary;
  if (name == "re" || name == "raw") return EncodingKind::kRaw;
  throw ConfigError("unknown population encoding '" + name +
                    "' (expected be or re)");
}

long long PopulationEncoding::decode() const {
  long long n = 0;
  for (std::uint8_t bit : bits) n = 2 * n + bit;
  return n;
}

PopulationEncoding encode_population(long long n, int k) {
  if (k < 1 || k > 62) throw DomainError("encoding width must be in [1, 62]");
  if (n <= 0) {
    throw DomainError("population size must be positive, got " +
                      std::to_string(n));
  }
  if (n >= (1LL << k)) {
    throw OverflowError("population size " + std::to_string(n) +
                        " does not fit in " + std::to_string(k) + " bits");
  }
  PopulationEncoding encoding;
  encoding.bits.resize(k);
  for (int j = 0; j < k; ++j) {
    encoding.bits[j] = static_cast<std::uint8_t>((n >> (k - 1 - j)) & 1);
  }
  return encoding;
}

Eigen::VectorXd raw_encoding(long long n) {
  return Eigen::VectorXd::Constant(1, static_cast<double>(n));
}

Eigen::VectorXd population_features(EncodingKind kind, long long n, int k) {
  if (kind == EncodingKind::kRaw) return raw_encoding(n);
  const PopulationEncoding encoding = encode_population(n, k);
  Eigen::VectorXd features(k);
  for (int j = 0; j < k; ++j) features(j) = encoding.bits[j];
  return features;
}

}  // namespace papo
