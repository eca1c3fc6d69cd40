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
// Microbenchmarks for the per-frame and per-sequence hot paths.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "aai/common.hpp"
#include "aai/ema.hpp"
#include "aai/frontend.hpp"
#include "aai/metrics.hpp"
#include "aai/model.hpp"

namespace aai {
namespace {

Waveform test_tone(double seconds) {
  std::vector<double> samples(
      static_cast<std::size_t>(std::lround(seconds * 16000.0)));
  Rng rng(7);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double t = static_cast<double>(n) / 16000.0;
    samples[n] = 0.4 * std::sin(2.0 * kPi * 220.0 * t) +
                 0.05 * rng.normal();
  }
  return normalize_waveform(samples, 16000.0);
}

Matrix random_matrix(long rows, long cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (long n = 0; n < m.size(); ++n) m.data()[n] = rng.normal();
  return m;
}

void BM_MfccFrame(benchmark::State& state) {
  const Waveform w = test_tone(0.1);
  const Matrix frames = frame_signal(w);
  const Vector frame = frames.row(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfcc(frame, w.sample_rate));
  }
}
BENCHMARK(BM_MfccFrame);

void BM_FrontEndSecond(benchmark::State& state) {
  const Waveform w = test_tone(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_acoustic_features(w));
  }
}
BENCHMARK(BM_FrontEndSecond);

void BM_SincDesign(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(design_windowed_sinc(25.0, 100.0, 50));
  }
}
BENCHMARK(BM_SincDesign);

void BM_LowpassApply(benchmark::State& state) {
  const SincKernel kernel = design_windowed_sinc(25.0, 100.0, 50);
  Vector x(static_cast<long>(state.range(0)));
  Rng rng(3);
  for (long i = 0; i < x.size(); ++i) x[i] = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowpass(x, kernel));
  }
}
BENCHMARK(BM_LowpassApply)->Arg(200)->Arg(2000);

void BM_BiLstmScan(benchmark::State& state) {
  ModelConfig mc;
  mc.dense_units = 64;
  mc.hidden_per_direction = static_cast<int>(state.range(0));
  const InversionModel model = init_model(mc, 11, SmootherMode::fixed);
  const Matrix seq = random_matrix(200, mc.dense_units, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bilstm_forward(model.bilstm1, seq));
  }
}
BENCHMARK(BM_BiLstmScan)->Arg(32)->Arg(200);

void BM_ModelForward(benchmark::State& state) {
  ModelConfig mc;
  mc.dense_units = 64;
  mc.hidden_per_direction = 32;
  const InversionModel model = init_model(mc, 11, SmootherMode::fixed);
  const Matrix seq = random_matrix(200, mc.input_dim, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model_forward(model, seq));
  }
}
BENCHMARK(BM_ModelForward);

void BM_PearsonCc(benchmark::State& state) {
  const Matrix pair = random_matrix(static_cast<long>(state.range(0)), 2, 9);
  const Vector a = pair.col(0);
  const Vector y = pair.col(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pearson_cc(a, y));
  }
}
BENCHMARK(BM_PearsonCc)->Arg(200)->Arg(20000);

}  // namespace
}  // namespace aai

BENCHMARK_MAIN();
