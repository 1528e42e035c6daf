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

#include "papo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "papo/errors.hpp"

namespace papo {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw IoError("checkpoint truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  float f32() {
    const std::uint32_t bits = u32();
    return std::bit_cast<float>(bits);
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

const CheckpointTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const CheckpointTensor& Checkpoint::require(const std::string& name, Index rows,
                                            Index cols) const {
  const CheckpointTensor* t = find(name);
  if (!t) throw IoError("checkpoint has no tensor '" + name + "'");
  if (t->rows != rows || t->cols != cols) {
    std::ostringstream msg;
    msg << "tensor '" << name << "' has shape " << t->rows << "x" << t->cols
        << ", expected " << rows << "x" << cols;
    throw IoError(msg.str());
  }
  return *t;
}

const std::string& Checkpoint::descriptor_value(const std::string& key) const {
  const auto it = descriptor.find(key);
  if (it == descriptor.end()) {
    throw IoError("checkpoint descriptor lacks '" + key + "'");
  }
  return it->second;
}

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(checkpoint.descriptor.size()));
  for (const auto& [key, value] : checkpoint.descriptor) {
    put_string(out, key);
    put_string(out, value);
  }
  put_u32(out, static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const auto& t : checkpoint.tensors) {
    if (t.data.size() != static_cast<std::size_t>(t.rows) * t.cols) {
      throw IoError("tensor '" + t.name + "' data does not match its shape");
    }
    put_string(out, t.name);
    put_u32(out, t.rows);
    put_u32(out, t.cols);
  }
  for (const auto& t : checkpoint.tensors) {
    for (float f : t.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  put_u64(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kCheckpointMagic) + 12 ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw IoError("not a checkpoint (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  {
    const std::string suffix = bytes.substr(body);
    Reader r(suffix);
    if (r.u64() != fnv1a(bytes.data(), body)) {
      throw IoError("checkpoint checksum mismatch");
    }
  }
  const std::string head = bytes.substr(sizeof(kCheckpointMagic));
  Reader r(head);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint checkpoint;
  const std::uint32_t entries = r.u32();
  for (std::uint32_t i = 0; i < entries; ++i) {
    std::string key = r.str();
    checkpoint.descriptor[key] = r.str();
  }
  const std::uint32_t count = r.u32();
  checkpoint.tensors.resize(count);
  for (auto& t : checkpoint.tensors) {
    t.name = r.str();
    t.rows = r.u32();
    t.cols = r.u32();
  }
  for (auto& t : checkpoint.tensors) {
    const std::size_t n = static_cast<std::size_t>(t.rows) * t.cols;
    r.need(4 * n);
    t.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.data[i] = r.f32();
  }
  if (sizeof(kCheckpointMagic) + r.pos() != body) {
    throw IoError("checkpoint has trailing bytes");
  }
  return checkpoint;
}

void write_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + tmp + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing checkpoint '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str());
}

}  // namespace papo
