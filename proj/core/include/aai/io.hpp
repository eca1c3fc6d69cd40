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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aai/common.hpp"
#include "aai/ema.hpp"

namespace aai {

// Shortest text form that round-trips an IEEE double exactly.
std::string format_double(double value);

double parse_double(const std::string& text);

// Comma-separated matrix with optional leading "# ..." comment lines.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& header_lines = {});
Matrix read_matrix_csv(const std::filesystem::path& path,
                       std::vector<std::string>* header_lines = nullptr);

struct FeatureCsv {
  std::string utterance;
  double frame_rate = 0.0;
  Matrix values;
};

// Frame-rate stamped matrix, one row per frame:
//   # utterance=<id> frame_rate=<hz>
void write_feature_csv(const std::filesystem::path& path, const Matrix& values,
                       const std::string& utterance_id, double frame_rate);
FeatureCsv read_feature_csv(const std::filesystem::path& path);

// Raw articulatory channels, one row per sample, with the canonical
// channel-name header row.
void write_ema_csv(const std::filesystem::path& path, const Matrix& samples);
Matrix read_ema_csv(const std::filesystem::path& path);

struct WavData {
  std::vector<double> samples;
  int sample_rate = 0;
};

// Mono 16-bit PCM only.
void write_wav(const std::filesystem::path& path,
               std::span<const double> samples, int sample_rate);
WavData read_wav(const std::filesystem::path& path);

void save_channel_stats(const std::filesystem::path& path,
                        const ChannelStats& stats);
ChannelStats load_channel_stats(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace aai
