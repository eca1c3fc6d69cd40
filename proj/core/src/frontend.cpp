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

#include "aai/frontend.hpp"

#include <algorithm>
#include <complex>

namespace aai {
namespace {

// Iterative radix-2 Cooley-Tukey, in place. fft_size is a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wn(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wn;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

struct MfccTables {
  Matrix filterbank;  // mel_filters x (fft_size/2 + 1)
  Matrix dct;         // num_coefficients x mel_filters
  Vector window;      // frame length
};

MfccTables build_tables(int frame_len, double sample_rate,
                        const MfccConfig& cfg) {
  MfccTables t;

  t.window.resize(frame_len);
  for (int n = 0; n < frame_len; ++n) {
    t.window[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (frame_len - 1));
  }

  const int bins = cfg.fft_size / 2 + 1;
  const double hz_per_bin = sample_rate / cfg.fft_size;
  Vector corners(cfg.mel_filters + 2);
  const double mel_lo = hz_to_mel(cfg.mel_low_hz);
  const double mel_hi = hz_to_mel(cfg.mel_high_hz);
  for (int k = 0; k < corners.size(); ++k) {
    corners[k] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * k / (cfg.mel_filters + 1));
  }
  t.filterbank = Matrix::Zero(cfg.mel_filters, bins);
  for (int j = 0; j < cfg.mel_filters; ++j) {
    const double lo = corners[j], center = corners[j + 1], hi = corners[j + 2];
    for (int i = 0; i < bins; ++i) {
      const double f = i * hz_per_bin;
      if (f >= lo && f <= center && center > lo) {
        t.filterbank(j, i) = (f - lo) / (center - lo);
      } else if (f > center && f <= hi && hi > center) {
        t.filterbank(j, i) = (hi - f) / (hi - center);
      }
    }
  }

  t.dct.resize(cfg.num_coefficients, cfg.mel_filters);
  const double m = cfg.mel_filters;
  for (int k = 0; k < cfg.num_coefficients; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (int j = 0; j < cfg.mel_filters; ++j) {
      t.dct(k, j) = alpha * std::cos(kPi * k * (2 * j + 1) / (2.0 * m));
    }
  }
  return t;
}

Vector mfcc_with_tables(const Eigen::Ref<const Vector>& frame,
                        const MfccConfig& cfg, const MfccTables& t) {
  std::vector<std::complex<double>> buf(cfg.fft_size, {0.0, 0.0});
  for (int n = 0; n < frame.size(); ++n) {
    buf[n] = frame[n] * t.window[n];
  }
  fft_radix2(buf);

  const int bins = cfg.fft_size / 2 + 1;
  Vector spectrum(bins);
  for (int i = 0; i < bins; ++i) spectrum[i] = std::abs(buf[i]);

  Vector energies = t.filterbank * spectrum;
  for (int j = 0; j < energies.size(); ++j) {
    energies[j] = std::log(std::max(energies[j], cfg.log_floor));
  }
  return t.dct * energies;
}

}  // namespace

Waveform normalize_waveform(std::span<const double> raw, double sample_rate) {
  if (raw.empty()) throw DegenerateSignal("empty input signal");
  if (sample_rate <= 0.0) throw DegenerateSignal("sample rate must be positive");
  double peak = 0.0;
  for (double v : raw) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw DegenerateSignal("all-zero input signal has no peak");

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(raw.size());
  const double scale = 0.5 / peak;
  for (std::size_t i = 0; i < raw.size(); ++i) w.samples[i] = raw[i] * scale;
  return w;
}

Matrix frame_signal(const Waveform& w, const FrameSpec& spec) {
  if (spec.hop_seconds <= 0.0 || spec.hop_seconds > spec.frame_seconds) {
    throw ConfigError("frame spec requires 0 < hop <= frame length");
  }
  const int frame_len = spec.frame_samples(w.sample_rate);
  const int hop = spec.hop_samples(w.sample_rate);
  const auto n = static_cast<long>(w.samples.size());
  if (n < frame_len) {
    throw TooShort("waveform of " + std::to_string(n) +
                   " samples is shorter than one frame (" +
                   std::to_string(frame_len) + ")");
  }
  const long frames = (n - frame_len) / hop + 1;
  Matrix out(frames, frame_len);
  for (long i = 0; i < frames; ++i) {
    for (int k = 0; k < frame_len; ++k) {
      out(i, k) = w.samples[static_cast<std::size_t>(i) * hop + k];
    }
  }
  return out;
}

Vector mfcc(const Eigen::Ref<const Vector>& frame, double sample_rate,
            const MfccConfig& cfg) {
  if (frame.size() > cfg.fft_size) {
    throw ShapeError("frame longer than FFT size");
  }
  const MfccTables tables =
      build_tables(static_cast<int>(frame.size()), sample_rate, cfg);
  return mfcc_with_tables(frame, cfg, tables);
}

Matrix delta_features(const Matrix& coefficients, int order) {
  if (order != 1 && order != 2) throw ConfigError("delta order must be 1 or 2");
  const long t_count = coefficients.rows();
  require(t_count >= 1, "delta_features needs at least one frame");

  // half-window 2 => denominator 2 * (1^2 + 2^2)
  constexpr int kHalf = 2;
  constexpr double kDenominator = 2.0 * (1.0 + 4.0);
  auto clamp_row = [&](long t) { return std::clamp(t, 0L, t_count - 1); };

  Matrix out(t_count, coefficients.cols());
  for (long t = 0; t < t_count; ++t) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(coefficients.cols());
    for (int n = 1; n <= kHalf; ++n) {
      acc += n * (coefficients.row(clamp_row(t + n)) -
                  coefficients.row(clamp_row(t - n)));
    }
    out.row(t) = acc / kDenominator;
  }
  return order == 1 ? out : delta_features(out, 1);
}

Matrix stack_context(const Matrix& features, int half_window) {
  const long t_count = features.rows();
  const long dim = features.cols();
  require(t_count >= 1, "stack_context needs at least one frame");

  const int width = 2 * half_window + 1;
  Matrix out(t_count, dim * width);
  for (long t = 0; t < t_count; ++t) {
    for (int k = -half_window; k <= half_window; ++k) {
      const long src = std::clamp(t + k, 0L, t_count - 1);
      out.block(t, (k + half_window) * dim, 1, dim) = features.row(src);
    }
  }
  return out;
}

AcousticSequence extract_acoustic_features(const Waveform& w,
                                           const FrameSpec& spec,
                                           const MfccConfig& cfg) {
  const Matrix frames = frame_signal(w, spec);
  const MfccTables tables = build_tables(static_cast<int>(frames.cols()),
                                         w.sample_rate, cfg);

  Matrix ceps(frames.rows(), cfg.num_coefficients);
  for (long i = 0; i < frames.rows(); ++i) {
    ceps.row(i) = mfcc_with_tables(frames.row(i).transpose(), cfg, tables);
  }

  const Matrix d1 = delta_features(ceps, 1);
  const Matrix d2 = delta_features(d1, 1);
  Matrix full(ceps.rows(), 3 * cfg.num_coefficients);
  full << ceps, d1, d2;

  AcousticSequence seq;
  seq.frames = stack_context(full, 5);
  seq.frame_rate = 1.0 / spec.hop_seconds;
  if (!seq.frames.allFinite()) {
    throw NumericalError("non-finite acoustic features");
  }
  return seq;
}

}  // namespace aai
