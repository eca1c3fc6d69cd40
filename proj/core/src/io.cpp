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

#include "aai/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aai {
namespace {

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw LoadError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw PersistenceError("cannot open " + path.string());
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc()) {
    throw LoadError("not a number: '" + text + "'");
  }
  return value;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& header_lines) {
  std::ofstream out = open_output(path, false);
  for (const std::string& line : header_lines) out << line << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw PersistenceError("write failed for " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path,
                       std::vector<std::string>* header_lines) {
  std::ifstream in = open_input(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool in_header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header && !line.empty() && line[0] == '#') {
      if (header_lines) header_lines->push_back(line);
      continue;
    }
    in_header = false;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_row(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(parse_double(f));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw LoadError("ragged csv row in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix values(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      values(r, c) = rows[static_cast<std::size_t>(r)]
                         [static_cast<std::size_t>(c)];
    }
  }
  return values;
}

void write_feature_csv(const std::filesystem::path& path, const Matrix& values,
                       const std::string& utterance_id, double frame_rate) {
  write_matrix_csv(path, values,
                   {"# utterance=" + utterance_id +
                    " frame_rate=" + format_double(frame_rate)});
}

FeatureCsv read_feature_csv(const std::filesystem::path& path) {
  std::vector<std::string> header;
  FeatureCsv result;
  result.values = read_matrix_csv(path, &header);
  for (const std::string& line : header) {
    std::istringstream fields(line.substr(1));
    std::string token;
    while (fields >> token) {
      if (token.rfind("utterance=", 0) == 0) {
        result.utterance = token.substr(10);
      } else if (token.rfind("frame_rate=", 0) == 0) {
        result.frame_rate = parse_double(token.substr(11));
      }
    }
  }
  if (result.utterance.empty() || result.frame_rate <= 0.0) {
    throw SchemaError("missing utterance/frame_rate header in " +
                      path.string());
  }
  return result;
}

void write_ema_csv(const std::filesystem::path& path, const Matrix& samples) {
  require(samples.cols() == kEmaChannels, "ema matrix must have 12 columns");
  std::ofstream out = open_output(path, false);
  for (int c = 0; c < kEmaChannels; ++c) {
    if (c) out << ',';
    out << kEmaChannelNames[static_cast<std::size_t>(c)];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      if (c) out << ',';
      out << format_double(samples(r, c));
    }
    out << '\n';
  }
  if (!out) throw PersistenceError("write failed for " + path.string());
}

Matrix read_ema_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, false);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("empty ema file " + path.string());
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> names = split_csv_row(line);
  if (names.size() != static_cast<std::size_t>(kEmaChannels)) {
    throw SchemaError("expected 12 channel names in " + path.string());
  }
  for (int c = 0; c < kEmaChannels; ++c) {
    if (names[static_cast<std::size_t>(c)] !=
        kEmaChannelNames[static_cast<std::size_t>(c)]) {
      throw SchemaError("unexpected channel '" +
                        names[static_cast<std::size_t>(c)] + "' in " +
                        path.string());
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_row(line);
    if (fields.size() != static_cast<std::size_t>(kEmaChannels)) {
      throw SchemaError("ragged ema row in " + path.string());
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  Matrix values(static_cast<Eigen::Index>(rows.size()), kEmaChannels);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < kEmaChannels; ++c) {
      values(r, c) = rows[static_cast<std::size_t>(r)]
                         [static_cast<std::size_t>(c)];
    }
  }
  return values;
}

void write_wav(const std::filesystem::path& path,
               std::span<const double> samples, int sample_rate) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(samples.size() * 2);
  std::string blob;
  blob.reserve(44 + data_bytes);
  blob += "RIFF";
  put_u32(blob, 36 + data_bytes);
  blob += "WAVEfmt ";
  put_u32(blob, 16);
  put_u16(blob, 1);  // PCM
  put_u16(blob, 1);  // mono
  put_u32(blob, static_cast<std::uint32_t>(sample_rate));
  put_u32(blob, static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(blob, 2);
  put_u16(blob, 16);
  blob += "data";
  put_u32(blob, data_bytes);
  for (double x : samples) {
    double scaled = x * 32767.0;
    long q = std::lround(scaled);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    put_u16(blob, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream out = open_output(path, true);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw PersistenceError("write failed for " + path.string());
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, true);
  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(blob.data());
  if (blob.size() < 44 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw LoadError("not a RIFF/WAVE file: " + path.string());
  }
  std::size_t offset = 12;
  WavData result;
  int channels = 0;
  int bits = 0;
  bool have_fmt = false;
  bool have_data = false;
  while (offset + 8 <= blob.size()) {
    const unsigned char* chunk = p + offset;
    std::uint32_t size = get_u32(chunk + 4);
    std::size_t body = offset + 8;
    if (body + size > blob.size()) {
      throw LoadError("truncated chunk in " + path.string());
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0 && size >= 16) {
      if (get_u16(p + body) != 1) {
        throw LoadError("only PCM wav supported: " + path.string());
      }
      channels = get_u16(p + body + 2);
      result.sample_rate = static_cast<int>(get_u32(p + body + 4));
      bits = get_u16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw LoadError("data before fmt in " + path.string());
      if (channels != 1 || bits != 16) {
        throw LoadError("only mono 16-bit wav supported: " + path.string());
      }
      std::size_t count = size / 2;
      result.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        std::int16_t s =
            static_cast<std::int16_t>(get_u16(p + body + 2 * i));
        result.samples[i] = static_cast<double>(s) / 32767.0;
      }
      have_data = true;
    }
    offset = body + size + (size & 1);
  }
  if (!have_data) throw LoadError("no data chunk in " + path.string());
  return result;
}

void save_channel_stats(const std::filesystem::path& path,
                        const ChannelStats& stats) {
  nlohmann::json doc;
  doc["channels"] = stats.channels();
  doc["mean"] = std::vector<double>(stats.mean.data(),
                                    stats.mean.data() + stats.mean.size());
  doc["stdev"] = std::vector<double>(stats.stdev.data(),
                                     stats.stdev.data() + stats.stdev.size());
  write_text_file(path, doc.dump(2) + "\n");
}

ChannelStats load_channel_stats(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("bad stats file " + path.string() + ": " + e.what());
  }
  if (!doc.contains("mean") || !doc.contains("stdev")) {
    throw SchemaError("stats file missing mean/stdev: " + path.string());
  }
  std::vector<double> mean = doc["mean"].get<std::vector<double>>();
  std::vector<double> stdev = doc["stdev"].get<std::vector<double>>();
  if (mean.size() != stdev.size() || mean.empty()) {
    throw SchemaError("inconsistent stats file " + path.string());
  }
  ChannelStats stats;
  stats.mean = Eigen::Map<const Vector>(mean.data(),
                                        static_cast<Eigen::Index>(mean.size()));
  stats.stdev = Eigen::Map<const Vector>(
      stdev.data(), static_cast<Eigen::Index>(stdev.size()));
  return stats;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, true);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out = open_output(path, true);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw PersistenceError("write failed for " + path.string());
}

}  // namespace aai
