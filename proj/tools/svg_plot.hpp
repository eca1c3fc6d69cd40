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
#include <string>
#include <vector>

#include "aai/common.hpp"

namespace aai {

struct PlotSeries {
  std::string label;
  std::string color;
  const Vector* values;
};

// One channel: overlaid polylines with a shared vertical scale and a legend.
void write_channel_svg(const std::filesystem::path& path,
                       const std::string& title,
                       const std::vector<PlotSeries>& series);

// All channels stacked in one file, one row per channel.
void write_combined_svg(const std::filesystem::path& path,
                        const std::string& title,
                        const std::vector<std::string>& channel_names,
                        const Matrix& target, const Matrix& raw,
                        const Matrix& smoothed);

}  // namespace aai
