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

// Binary checkpoint container, version 1. All integers little-endian:
//
//   "PAPOCKPT"                         8-byte magic
//   u32 version                        = 1
//   u32 n_entries, then per entry      descriptor (string key/value pairs)
//     u32 len, key bytes, u32 len, value bytes
//   u32 n_tensors, then per tensor     shape table
//     u32 len, name bytes, u32 rows, u32 cols
//   f32 data                           every tensor, row-major, table order
//   u64 FNV-1a of all preceding bytes
//
// See docs/formats.md.

#ifndef PAPO_CHECKPOINT_HPP_
#define PAPO_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "papo/types.hpp"

namespace papo {

inline constexpr char kCheckpointMagic[8] = {'P', 'A', 'P', 'O',
                                             'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> data;
};

struct Checkpoint {
  std::map<std::string, std::string> descriptor;
  std::vector<CheckpointTensor> tensors;

  template <typename Scalar>
  void add(const std::string& name, const Matrix<Scalar>& value) {
    CheckpointTensor t;
    t.name = name;
    t.rows = static_cast<std::uint32_t>(value.rows());
    t.cols = static_cast<std::uint32_t>(value.cols());
    t.data.resize(value.size());
    for (Index i = 0; i < value.size(); ++i) {
      t.data[i] = static_cast<float>(value.data()[i]);
    }
    tensors.push_back(std::move(t));
  }

  const CheckpointTensor* find(const std::string& name) const;

  // Throws IoError when the tensor is missing or has another shape.
  template <typename Scalar>
  Matrix<Scalar> get(const std::string& name, Index rows, Index cols) const {
    const CheckpointTensor& t = require(name, rows, cols);
    Matrix<Scalar> out(rows, cols);
    for (Index i = 0; i < out.size(); ++i) {
      out.data()[i] = static_cast<Scalar>(t.data[i]);
    }
    return out;
  }

  const std::string& descriptor_value(const std::string& key) const;

 private:
  const CheckpointTensor& require(const std::string& name, Index rows,
                                  Index cols) const;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void write_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace papo

#endif  // PAPO_CHECKPOINT_HPP_
