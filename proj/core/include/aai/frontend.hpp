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
// Acoustic front end: peak normalization, framing, MFCC extraction with
// first/second order deltas, and context stacking to the 429-dimensional
// network input (11 frames * 39 features at 100 frames/s).

#pragma once

#include <span>

#include "aai/common.hpp"

namespace aai {

struct Waveform {
  std::vector<double> samples;  // peak-normalized, |x| <= 0.5
  double sample_rate = 16000.0;
};

struct FrameSpec {
  double frame_seconds = 0.025;
  double hop_seconds = 0.010;

  int frame_samples(double sample_rate) const {
    return static_cast<int>(std::lround(frame_seconds * sample_rate));
  }
  int hop_samples(double sample_rate) const {
    return static_cast<int>(std::lround(hop_seconds * sample_rate));
  }
};

struct MfccConfig {
  int fft_size = 512;
  int mel_filters = 26;
  int num_coefficients = 13;  // c0..c12
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;
  double log_floor = 1e-10;
};

struct AcousticSequence {
  Matrix frames;             // T x 429
  double frame_rate = 100.0;  // Hz
};

// Scale so that max |sample| is exactly 0.5. All-zero or empty input has no
// defined peak and raises DegenerateSignal.
Waveform normalize_waveform(std::span<const double> raw, double sample_rate);

// Rows are frames of frame_samples() length, hop_samples() apart. Raises
// TooShort when the waveform does not cover one full frame.
Matrix frame_signal(const Waveform& w, const FrameSpec& spec = {});

// One frame -> 13 cepstral coefficients. Pipeline: Hamming window,
// zero-padded magnitude FFT, triangular mel filterbank (corners at exact
// mel-spaced frequencies, evaluated at bin centers), natural log with floor,
// orthonormal DCT-II.
Vector mfcc(const Eigen::Ref<const Vector>& frame, double sample_rate,
            const MfccConfig& cfg = {});

// Regression deltas with half-window 2 and replicated edges:
//   d_t = sum_{n=1..2} n (c_{t+n} - c_{t-n}) / (2 sum n^2)
// order 2 applies the operator to the order-1 output.
Matrix delta_features(const Matrix& coefficients, int order);

// Row t becomes the concatenation of rows t-half_window .. t+half_window
// (replicated at the edges).
Matrix stack_context(const Matrix& features, int half_window);

// Full front end: frames -> MFCC -> [mfcc, delta, delta-delta] -> context
// stack. Output is T x 429 at 100 frames/s for 16 kHz input.
AcousticSequence extract_acoustic_features(const Waveform& w,
                                           const FrameSpec& spec = {},
                                           const MfccConfig& cfg = {});

}  // namespace aai
