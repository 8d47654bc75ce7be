// Copyright 2026 The kgneg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/model.hpp"

namespace kgneg {

// Layout (little-endian):
//   "KGNE" | version u8 | family u8 | dim u64 | entities u64 | relations u64 |
//   entity table f64[] | relation table f64[]
inline constexpr std::array<char, 4> kCheckpointMagic{'K', 'G', 'N', 'E'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("checkpoint truncated");
  return v;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& out, const ModelParams& p) {
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::write_pod(out, kCheckpointVersion);
  detail::write_pod(out, static_cast<std::uint8_t>(p.family));
  detail::write_pod(out, static_cast<std::uint64_t>(p.dim));
  detail::write_pod(out, static_cast<std::uint64_t>(p.num_entities));
  detail::write_pod(out, static_cast<std::uint64_t>(p.num_relations));
  out.write(reinterpret_cast<const char*>(p.entities.data()),
            static_cast<std::streamsize>(p.entities.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(p.relations.data()),
            static_cast<std::streamsize>(p.relations.size() * sizeof(double)));
}

inline ModelParams read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCheckpointMagic) throw IoError("not a kgneg checkpoint");
  const auto version = detail::read_pod<std::uint8_t>(in);
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto family = detail::read_pod<std::uint8_t>(in);
  if (family > static_cast<std::uint8_t>(Family::kComplEx)) throw IoError("unknown model family tag");
  const auto dim = detail::read_pod<std::uint64_t>(in);
  const auto ne = detail::read_pod<std::uint64_t>(in);
  const auto nr = detail::read_pod<std::uint64_t>(in);
  ModelParams p(static_cast<Family>(family), dim, ne, nr);
  in.read(reinterpret_cast<char*>(p.entities.data()), static_cast<std::streamsize>(p.entities.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(p.relations.data()),
          static_cast<std::streamsize>(p.relations.size() * sizeof(double)));
  if (!in) throw IoError("checkpoint truncated");
  return p;
}

inline void save_checkpoint(const std::filesystem::path& path, const ModelParams& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  write_checkpoint(out, p);
  if (!out) throw IoError("write failed for " + path.string());
}

inline ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace kgneg
