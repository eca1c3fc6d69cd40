// Copyright 2026 The AAI Toolkit Authors. All rights reserved.
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

#include <cstring>
#include <fstream>

#include "aai/model.hpp"

namespace aai {
namespace {

constexpr char kMagic[4] = {'A', 'A', 'I', 'M'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

void write_string(std::ofstream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  write_bytes(out, s.data(), s.size());
}

void write_vector(std::ofstream& out, const Vector& v) {
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  write_bytes(out, v.data(), static_cast<std::size_t>(v.size()) * 8);
}

void read_bytes(std::ifstream& in, void* data, std::size_t n,
                const std::string& what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw PersistenceError("truncated model file while reading " + what);
  }
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& what) {
  T value;
  read_bytes(in, &value, sizeof(T), what);
  return value;
}

std::string read_string(std::ifstream& in, const std::string& what) {
  const auto n = read_pod<std::uint32_t>(in, what);
  if (n > (1u << 20)) throw PersistenceError("implausible string in " + what);
  std::string s(n, '\0');
  read_bytes(in, s.data(), n, what);
  return s;
}

Vector read_vector(std::ifstream& in, const std::string& what) {
  const auto n = read_pod<std::uint64_t>(in, what);
  if (n > (1ull << 32)) throw PersistenceError("implausible size in " + what);
  Vector v(static_cast<Eigen::Index>(n));
  read_bytes(in, v.data(), static_cast<std::size_t>(n) * 8, what);
  return v;
}

}  // namespace

void save_model(const std::filesystem::path& path,
                const InversionModel& model) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PersistenceError("cannot open " + path.string());
  write_bytes(out, kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::int32_t>(out, model.config.input_dim);
  write_pod<std::int32_t>(out, model.config.dense_units);
  write_pod<std::int32_t>(out, model.config.hidden_per_direction);
  write_pod<std::int32_t>(out, model.config.output_channels);
  write_pod<std::int32_t>(out, model.config.smoother_taps);
  write_pod<std::uint8_t>(out, model.config.per_channel_smoother ? 1 : 0);
  write_pod<std::uint8_t>(out, model.smoother.frozen ? 1 : 0);
  write_pod<std::uint64_t>(out, model.seed);
  write_pod<std::uint8_t>(out, model.input_stats ? 1 : 0);
  if (model.input_stats) {
    write_vector(out, model.input_stats->mean);
    write_vector(out, model.input_stats->stdev);
  }
  write_pod<std::uint8_t>(out, model.target_stats ? 1 : 0);
  if (model.target_stats) {
    write_vector(out, model.target_stats->mean);
    write_vector(out, model.target_stats->stdev);
  }
  const auto tensors = parameter_tensors(model, false);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const ConstTensorView& t : tensors) {
    write_string(out, t.name);
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t.size));
    write_bytes(out, t.data, static_cast<std::size_t>(t.size) * 8);
  }
  if (!out) throw PersistenceError("write failed for " + path.string());
}

InversionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PersistenceError("cannot open " + path.string());
  char magic[4];
  read_bytes(in, magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw PersistenceError("not a model file: " + path.string());
  }
  const auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kVersion) {
    throw PersistenceError("unsupported model file version " +
                           std::to_string(version) + " (expected " +
                           std::to_string(kVersion) + ")");
  }
  ModelConfig config;
  config.input_dim = read_pod<std::int32_t>(in, "input_dim");
  config.dense_units = read_pod<std::int32_t>(in, "dense_units");
  config.hidden_per_direction =
      read_pod<std::int32_t>(in, "hidden_per_direction");
  config.output_channels = read_pod<std::int32_t>(in, "output_channels");
  config.smoother_taps = read_pod<std::int32_t>(in, "smoother_taps");
  config.per_channel_smoother =
      read_pod<std::uint8_t>(in, "per_channel_smoother") != 0;
  if (config.input_dim <= 0 || config.dense_units <= 0 ||
      config.hidden_per_direction <= 0 || config.output_channels <= 0 ||
      config.smoother_taps <= 0) {
    throw PersistenceError("invalid architecture constants in " +
                           path.string());
  }
  // Architecture fixed to zeros first, then overwritten tensor by tensor.
  InversionModel model = init_model(config, 0, SmootherMode::adaptive);
  model.smoother.frozen = read_pod<std::uint8_t>(in, "frozen") != 0;
  model.seed = read_pod<std::uint64_t>(in, "seed");
  if (read_pod<std::uint8_t>(in, "input_stats flag") != 0) {
    ChannelStats stats;
    stats.mean = read_vector(in, "input_stats mean");
    stats.stdev = read_vector(in, "input_stats stdev");
    model.input_stats = std::move(stats);
  }
  if (read_pod<std::uint8_t>(in, "target_stats flag") != 0) {
    ChannelStats stats;
    stats.mean = read_vector(in, "target_stats mean");
    stats.stdev = read_vector(in, "target_stats stdev");
    model.target_stats = std::move(stats);
  }
  auto tensors = parameter_tensors(model, false);
  const auto count = read_pod<std::uint32_t>(in, "tensor count");
  if (count != tensors.size()) {
    throw PersistenceError("tensor count mismatch in " + path.string());
  }
  for (TensorView& t : tensors) {
    const std::string name = read_string(in, "tensor name");
    if (name != t.name) {
      throw PersistenceError("unexpected tensor '" + name + "', wanted '" +
                             t.name + "'");
    }
    const auto size = read_pod<std::uint64_t>(in, name + " size");
    if (size != static_cast<std::uint64_t>(t.size)) {
      throw PersistenceError("size mismatch for tensor " + name);
    }
    read_bytes(in, t.data, static_cast<std::size_t>(size) * 8, name);
  }
  return model;
}

}  // namespace aai
