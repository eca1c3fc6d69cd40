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

#include "aai/ema.hpp"

#include <algorithm>

namespace aai {
namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Fold an out-of-range index back into [0, n) by mirroring about the ends
// (the edge sample is not repeated).
long reflect_index(long i, long n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

SincKernel design_windowed_sinc(double cutoff_hz, double sample_rate,
                                int n_taps) {
  if (n_taps < 2) throw ConfigError("sinc kernel needs at least 2 taps");
  if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate / 2.0) {
    throw InvalidCutoff("cutoff " + std::to_string(cutoff_hz) +
                        " Hz outside (0, " + std::to_string(sample_rate / 2.0) +
                        ") at fs=" + std::to_string(sample_rate));
  }

  SincKernel k;
  k.cutoff_norm = cutoff_hz / sample_rate;
  k.taps.resize(n_taps);
  const double center = (n_taps - 1) / 2.0;
  for (int i = 0; i < n_taps; ++i) {
    const double hann = 0.5 * (1.0 - std::cos(2.0 * kPi * i / (n_taps - 1)));
    k.taps[i] = sinc(2.0 * k.cutoff_norm * (i - center)) * hann;
  }
  k.taps /= k.taps.sum();
  return k;
}

Vector lowpass(const Eigen::Ref<const Vector>& trajectory,
               const SincKernel& kernel) {
  const long n = trajectory.size();
  require(n >= 1, "lowpass needs a non-empty trajectory");
  const long k_len = kernel.taps.size();
  const long pad_left = (k_len - 1) / 2;

  Vector out = Vector::Zero(n);
  for (long t = 0; t < n; ++t) {
    double acc = 0.0;
    for (long k = 0; k < k_len; ++k) {
      acc += kernel.taps[k] * trajectory[reflect_index(t + k - pad_left, n)];
    }
    out[t] = acc;
  }
  return out;
}

double constriction_location(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) {
    throw DegenerateCoordinate("constriction location undefined at the origin");
  }
  return x / r;
}

double lip_aperture(double ul_x, double ul_y, double ll_x, double ll_y,
                    LipApertureFormula formula) {
  if (formula == LipApertureFormula::euclidean) {
    return std::hypot(ul_x - ll_x, ul_y - ll_y);
  }
  const double radicand = (ul_x * ul_x - ll_x * ll_x) +
                          (ul_y * ul_y + ll_y * ll_y);
  if (radicand < 0.0) {
    throw NegativeRadicand("literal lip aperture radicand " +
                           std::to_string(radicand) + " is negative");
  }
  return std::sqrt(radicand);
}

double lip_protrusion(double ul_x, double ll_x) {
  return (ul_x + ll_x) / 2.0;
}

Vector resample_to_frame_rate(const Eigen::Ref<const Vector>& trajectory,
                              double source_rate, double target_rate,
                              int target_len) {
  const long n = trajectory.size();
  require(n >= 1, "resample needs a non-empty trajectory");
  Vector out(target_len);
  for (int i = 0; i < target_len; ++i) {
    const double pos = (i / target_rate) * source_rate;
    const long lo = std::clamp(static_cast<long>(std::floor(pos)), 0L, n - 1);
    const long hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    out[i] = trajectory[lo] + std::clamp(frac, 0.0, 1.0) *
                                  (trajectory[hi] - trajectory[lo]);
  }
  return out;
}

ChannelStats fit_channel_stats(const std::vector<Matrix>& sequences,
                               double std_floor) {
  require(!sequences.empty(), "cannot fit stats on an empty set");
  const long cols = sequences.front().cols();
  long total = 0;
  Vector sum = Vector::Zero(cols);
  for (const Matrix& m : sequences) {
    require(m.cols() == cols, "inconsistent channel counts across sequences");
    sum += m.colwise().sum().transpose();
    total += m.rows();
  }
  ChannelStats stats;
  stats.mean = sum / static_cast<double>(total);
  Vector sq = Vector::Zero(cols);
  for (const Matrix& m : sequences) {
    sq += (m.rowwise() - stats.mean.transpose())
              .array()
              .square()
              .colwise()
              .sum()
              .transpose()
              .matrix();
  }
  stats.stdev = (sq / static_cast<double>(total)).array().sqrt();
  for (long c = 0; c < cols; ++c) {
    if (std_floor > 0.0) {
      stats.stdev[c] = std::max(stats.stdev[c], std_floor);
    } else if (stats.stdev[c] <= 1e-12) {
      throw ConstantChannel("channel " + std::to_string(c) +
                            " has (near-)zero variance");
    }
  }
  return stats;
}

std::pair<Matrix, ChannelStats> zscore_fit_apply(
    const Matrix& seq, const std::optional<ChannelStats>& stats) {
  ChannelStats s = stats ? *stats : fit_channel_stats({seq});
  require(s.channels() == seq.cols(), "stats channel count mismatch");
  Matrix out = (seq.rowwise() - s.mean.transpose()).array().rowwise() /
               s.stdev.transpose().array();
  return {std::move(out), std::move(s)};
}

Matrix zscore_inverse(const Matrix& seq, const ChannelStats& stats) {
  require(stats.channels() == seq.cols(), "stats channel count mismatch");
  return (seq.array().rowwise() * stats.stdev.transpose().array()).matrix()
             .rowwise() +
         stats.mean.transpose();
}

ArticulatorySequence build_unnormalized_targets(
    const EmaRecording& rec, int target_len, const TargetPipelineConfig& cfg) {
  require(rec.channels.cols() == kEmaChannels,
          "EMA recording must have 12 channels");
  require(rec.channels.rows() >= 1, "EMA recording is empty");
  if (!rec.channels.allFinite()) {
    throw NumericalError("non-finite EMA samples");
  }

  const SincKernel native_kernel =
      design_windowed_sinc(cfg.sinc_cutoff_hz, rec.sample_rate, cfg.sinc_taps);
  const long n = rec.channels.rows();
  Matrix smoothed(n, kEmaChannels);
  for (int c = 0; c < kEmaChannels; ++c) {
    smoothed.col(c) = lowpass(rec.channels.col(c), native_kernel);
  }

  // Columns as named in kEmaChannelNames: UL=(0,1) LL=(2,3) TT=(6,7) TB=(8,9).
  Matrix full(n, kArticulatoryChannels);
  full.leftCols(kEmaChannels) = smoothed;
  for (long t = 0; t < n; ++t) {
    full(t, 12) = constriction_location(smoothed(t, 6), smoothed(t, 7));
    full(t, 13) = constriction_location(smoothed(t, 8), smoothed(t, 9));
    full(t, 14) = lip_aperture(smoothed(t, 0), smoothed(t, 1), smoothed(t, 2),
                               smoothed(t, 3), cfg.lip_aperture_formula);
    full(t, 15) = lip_protrusion(smoothed(t, 0), smoothed(t, 2));
  }

  ArticulatorySequence seq;
  seq.frame_rate = 100.0;
  seq.frames.resize(target_len, kArticulatoryChannels);
  for (int c = 0; c < kArticulatoryChannels; ++c) {
    seq.frames.col(c) = resample_to_frame_rate(full.col(c), rec.sample_rate,
                                               seq.frame_rate, target_len);
  }
  return seq;
}

ArticulatorySequence finalize_targets(const ArticulatorySequence& unnormalized,
                                      const ChannelStats& stats,
                                      const TargetPipelineConfig& cfg) {
  auto [normalized, _] = zscore_fit_apply(unnormalized.frames, stats);
  const SincKernel frame_kernel = design_windowed_sinc(
      cfg.sinc_cutoff_hz, unnormalized.frame_rate, cfg.sinc_taps);
  ArticulatorySequence out;
  out.frame_rate = unnormalized.frame_rate;
  out.frames.resize(normalized.rows(), normalized.cols());
  for (long c = 0; c < normalized.cols(); ++c) {
    out.frames.col(c) = lowpass(normalized.col(c), frame_kernel);
  }
  return out;
}

ArticulatorySequence build_targets(const EmaRecording& rec, int target_len,
                                   const ChannelStats& stats,
                                   const TargetPipelineConfig& cfg) {
  return finalize_targets(build_unnormalized_targets(rec, target_len, cfg),
                          stats, cfg);
}

}  // namespace aai
