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
//
// EMA target pipeline: windowed-sinc smoothing of the 12 sensor coordinate
// trajectories, tract-variable computation (TTCL, TBCL, LA, LP), resampling
// to the acoustic frame rate, z-score normalization, and post-normalization
// smoothing. Output is the 16-channel regression target.

#pragma once

#include <array>
#include <optional>

#include "aai/common.hpp"

namespace aai {

inline constexpr int kEmaChannels = 12;
inline constexpr int kArticulatoryChannels = 16;

inline constexpr std::array<const char*, kEmaChannels> kEmaChannelNames = {
    "UL_x", "UL_y", "LL_x", "LL_y", "LI_x", "LI_y",
    "TT_x", "TT_y", "TB_x", "TB_y", "TD_x", "TD_y"};

inline constexpr std::array<const char*, kArticulatoryChannels>
    kArticulatoryChannelNames = {"UL_x", "UL_y", "LL_x", "LL_y", "LI_x",
                                 "LI_y", "TT_x", "TT_y", "TB_x", "TB_y",
                                 "TD_x", "TD_y", "TTCL", "TBCL", "LA", "LP"};

struct EmaRecording {
  Matrix channels;     // N x 12, column order kEmaChannelNames, mm
  double sample_rate;  // Hz
};

struct SincKernel {
  Vector taps;         // length N, unit sum
  double cutoff_norm;  // fc / fs in cycles per sample
};

struct ArticulatorySequence {
  Matrix frames;              // T x 16, column order kArticulatoryChannelNames
  double frame_rate = 100.0;  // Hz
};

struct ChannelStats {
  Vector mean;
  Vector stdev;  // population (1/N) standard deviation, all > 0

  int channels() const { return static_cast<int>(mean.size()); }
};

enum class LipApertureFormula {
  literal,    // sqrt((ULx^2 - LLx^2) + (ULy^2 + LLy^2))
  euclidean,  // sqrt((ULx - LLx)^2 + (ULy - LLy)^2)
};

struct TargetPipelineConfig {
  double sinc_cutoff_hz = 25.0;
  int sinc_taps = 50;
  LipApertureFormula lip_aperture_formula = LipApertureFormula::literal;
};

// Hann-windowed sinc low-pass, normalized to unit tap sum (unit DC gain):
//   taps[i] = sinc(2 (fc/fs) (i - (N-1)/2)) * hann(i)
SincKernel design_windowed_sinc(double cutoff_hz, double sample_rate,
                                int n_taps);

// Same-length convolution with reflected boundaries. A constant input maps
// to itself.
Vector lowpass(const Eigen::Ref<const Vector>& trajectory,
               const SincKernel& kernel);

// x / sqrt(x^2 + y^2): cosine of the polar angle, in [-1, 1].
double constriction_location(double x, double y);

double lip_aperture(double ul_x, double ul_y, double ll_x, double ll_y,
                    LipApertureFormula formula);

double lip_protrusion(double ul_x, double ll_x);

// Linear interpolation of trajectory (sampled at source_rate, sample k at
// time k/source_rate) onto the frame grid t_i = i / target_rate,
// i = 0..target_len-1, clamped at the ends.
Vector resample_to_frame_rate(const Eigen::Ref<const Vector>& trajectory,
                              double source_rate, double target_rate,
                              int target_len);

// Pools all rows of all sequences. A zero std_floor keeps the strict
// contract (ConstantChannel when a channel's std is <= 1e-12); a positive
// floor clamps instead, for wide feature matrices where a flat column is
// harmless.
ChannelStats fit_channel_stats(const std::vector<Matrix>& sequences,
                               double std_floor = 0.0);

// Fits on seq when stats is absent, otherwise applies the given stats.
std::pair<Matrix, ChannelStats> zscore_fit_apply(
    const Matrix& seq, const std::optional<ChannelStats>& stats = std::nullopt);

Matrix zscore_inverse(const Matrix& seq, const ChannelStats& stats);

// Stage one of the target pipeline: low-pass all 12 channels at the native
// rate, compute the four tract variables per sample, resample all 16
// channels to target_len at 100 Hz. Output is in mm / TV units.
ArticulatorySequence build_unnormalized_targets(
    const EmaRecording& rec, int target_len,
    const TargetPipelineConfig& cfg = {});

// Stage two: z-score with the given (train-fitted) stats, then low-pass
// again at the frame rate.
ArticulatorySequence finalize_targets(const ArticulatorySequence& unnormalized,
                                      const ChannelStats& stats,
                                      const TargetPipelineConfig& cfg = {});

// Full pipeline; stats must be fitted on the training partition.
ArticulatorySequence build_targets(const EmaRecording& rec, int target_len,
                                   const ChannelStats& stats,
                                   const TargetPipelineConfig& cfg = {});

}  // namespace aai
