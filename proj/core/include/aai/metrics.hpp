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
#include "aai/ema.hpp"
#include "aai/model.hpp"

namespace aai {

// Standard Pearson coefficient cov(a, y) / (s_a * s_y). The denominator is
// computed as sqrt(var_a * var_y) so that y == a and y == -a give exactly
// +1 and -1.
double pearson_cc(const Eigen::Ref<const Vector>& a,
                  const Eigen::Ref<const Vector>& y);

double rmse(const Eigen::Ref<const Vector>& a,
            const Eigen::Ref<const Vector>& y);

struct EvalReport {
  std::vector<std::string> utterance_ids;
  std::vector<std::string> channel_names;
  Matrix utterance_pcc;    // U x 16
  Matrix utterance_rmse;   // U x 16, mm
  Vector channel_pcc;      // per-channel mean over utterances
  Vector channel_rmse;
  Vector utterance_mean_pcc;   // per-utterance mean over channels
  Vector utterance_mean_rmse;
  // Grand mean; identical whether channels or utterances are averaged first.
  double aggregate_pcc = 0.0;
  double aggregate_rmse = 0.0;
  std::string mode;
  std::string speaker;
  std::string corpus;
};

// Scores already-denormalized trajectories (mm) against references of the
// same shape.
EvalReport evaluate_trajectories(const std::vector<std::string>& ids,
                                 const std::vector<Matrix>& predicted_mm,
                                 const std::vector<Matrix>& target_mm);

struct EvalItem {
  std::string id;
  const Matrix* acoustic;   // T x input_dim, unnormalized features
  const Matrix* target_mm;  // T x 16, pre-normalization targets (mm)
};

// Runs the model on each item, de-normalizes predictions with target_stats,
// and scores them against the finalized (smoothed) targets in mm.
EvalReport evaluate(const InversionModel& model,
                    const std::vector<EvalItem>& items,
                    const ChannelStats& target_stats,
                    const TargetPipelineConfig& pipeline = {});

// Per-channel table plus aggregate footer.
void write_eval_report(const std::filesystem::path& path,
                       const EvalReport& report);
void write_per_utterance_report(const std::filesystem::path& path,
                                const EvalReport& report);

}  // namespace aai
