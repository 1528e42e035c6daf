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

#ifndef PAPO_POP_ENCODING_HPP_
#define PAPO_POP_ENCODING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace papo {

enum class EncodingKind { kBinary, kRaw };

std::string to_string(EncodingKind kind);
EncodingKind parse_encoding_kind(const std::string& name);

// Big-endian bit vector: N = sum_j 2^(k-1-j) * bits[j].
struct PopulationEncoding {
  std::vector<std::uint8_t> bits;

  int width() const { return static_cast<int>(bits.size()); }
  long long decode() const;
};

// Throws DomainError for N <= 0 and OverflowError for N >= 2^k.
PopulationEncoding encode_population(long long n, int k = 12);

// [N] as a length-1 vector, deliberately unnormalized.
Eigen::VectorXd raw_encoding(long long n);

// Network-facing features: the bits as 0/1 reals, or the raw scalar.
Eigen::VectorXd population_features(EncodingKind kind, long long n, int k);
inline int population_feature_width(EncodingKind kind, int k) {
  return kind == EncodingKind::kBinary ? k : 1;
}

}  // namespace papo

#endif  // PAPO_POP_ENCODING_HPP_
