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

#include <cmath>
#include <vector>

#include "doctest.h"

namespace aai {
namespace {

// Reference MFCC of one 400-sample frame of 0.5 sin(2 pi 1000 t / 16000),
// frozen from an independent textbook implementation (Hamming window,
// 512-point FFT, 26 triangular mel filters over 0..8000 Hz, natural log,
// orthonormal DCT-II).
constexpr double kSineMfccOracle[13] = {
    -3.98349727721956537e+00, 4.11363217147853533e+00,
    -3.10551797824925968e+00, -3.75768570326432405e+00,
    -1.08514617305214189e+00, 1.69435584693071939e+00,
    2.34675146388680389e+00,  5.09309303023758209e-01,
    -1.51403776374656185e+00, -1.80568976572296247e+00,
    -1.91872307870368713e-01, 1.42267089945419611e+00,
    1.47318827041326594e+00};

// log(1e-10 ^ 13-filter floor) through the DCT: only c0 is nonzero.
constexpr double kSilentC0 = -1.17409263208844976e+02;

Vector sine_frame(int n, double freq, double amp) {
  Vector frame(n);
  for (int i = 0; i < n; ++i) {
    frame[i] = amp * std::sin(2.0 * kPi * freq * i / 16000.0);
  }
  return frame;
}

TEST_CASE("normalize_waveform peaks at exactly 0.5") {
  std::vector<double> raw = {0.1, -0.4, 0.2, 0.05};
  const Waveform w = normalize_waveform(raw, 16000.0);
  CHECK(w.sample_rate == 16000.0);
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak == 0.5);
  CHECK(w.samples[1] == -0.5);
  CHECK(w.samples[0] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("normalize_waveform rejects silence and empty input") {
  std::vector<double> zeros(100, 0.0);
  CHECK_THROWS_AS(normalize_waveform(zeros, 16000.0), DegenerateSignal);
  CHECK_THROWS_AS(normalize_waveform(std::vector<double>{}, 16000.0),
                  DegenerateSignal);
}

TEST_CASE("frame_signal count follows 1 + floor((N - frame) / hop)") {
  FrameSpec spec;
  CHECK(spec.frame_samples(16000.0) == 400);
  CHECK(spec.hop_samples(16000.0) == 160);

  auto frames_for = [&](int n) {
    Waveform w;
    w.samples.assign(n, 0.0);
    w.samples[0] = 0.5;
    return frame_signal(w, spec).rows();
  };
  CHECK(frames_for(400) == 1);
  CHECK(frames_for(559) == 1);
  CHECK(frames_for(560) == 2);
  CHECK(frames_for(16000) == 98);
  CHECK(frames_for(32000) == 198);

  Waveform tiny;
  tiny.samples.assign(399, 0.1);
  CHECK_THROWS_AS(frame_signal(tiny, spec), TooShort);
}

TEST_CASE("frame rows are hop-shifted windows of the signal") {
  Waveform w;
  w.samples.resize(900);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = 0.5 * std::sin(0.01 * static_cast<double>(i));
  }
  const Matrix frames = frame_signal(w);
  REQUIRE(frames.rows() == 4);
  REQUIRE(frames.cols() == 400);
  for (int r = 0; r < frames.rows(); ++r) {
    for (int c = 0; c < frames.cols(); ++c) {
      CHECK(frames(r, c) == w.samples[static_cast<std::size_t>(160 * r + c)]);
    }
  }
}

TEST_CASE("mfcc of a 1 kHz sine matches the frozen oracle") {
  const Vector c = mfcc(sine_frame(400, 1000.0, 0.5), 16000.0);
  REQUIRE(c.size() == 13);
  for (int i = 0; i < 13; ++i) {
    CHECK(c[i] == doctest::Approx(kSineMfccOracle[i]).epsilon(1e-9));
  }
}

TEST_CASE("mfcc of silence hits the log floor") {
  const Vector c = mfcc(Vector::Zero(400), 16000.0);
  CHECK(c[0] == doctest::Approx(kSilentC0).epsilon(1e-12));
  for (int i = 1; i < 13; ++i) CHECK(std::abs(c[i]) < 1e-10);
}

TEST_CASE("mfcc is invariant to sign flips") {
  const Vector frame = sine_frame(400, 731.0, 0.37);
  const Vector a = mfcc(frame, 16000.0);
  const Vector b = mfcc((-frame).eval(), 16000.0);
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("delta_features matches the regression formula") {
  Rng rng(21);
  Matrix c(9, 13);
  for (int r = 0; r < c.rows(); ++r) {
    for (int k = 0; k < c.cols(); ++k) c(r, k) = rng.normal();
  }
  const Matrix d = delta_features(c, 1);
  REQUIRE(d.rows() == c.rows());
  REQUIRE(d.cols() == c.cols());

  auto at = [&](int t) { return c.row(std::clamp<int>(t, 0, 8)); };
  for (int t = 0; t < 9; ++t) {
    const Eigen::RowVectorXd want =
        (1.0 * (at(t + 1) - at(t - 1)) + 2.0 * (at(t + 2) - at(t - 2))) /
        (2.0 * (1.0 + 4.0));
    for (int k = 0; k < 13; ++k) {
      CHECK(d(t, k) == doctest::Approx(want[k]).epsilon(1e-14));
    }
  }

  const Matrix dd = delta_features(c, 2);
  const Matrix dd_manual = delta_features(delta_features(c, 1), 1);
  CHECK((dd.array() == dd_manual.array()).all());
}

TEST_CASE("delta of a constant sequence is zero") {
  const Matrix c = Matrix::Constant(6, 13, 2.5);
  CHECK(delta_features(c, 1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(delta_features(c, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stack_context concatenates clamped neighbor rows") {
  Matrix f(4, 2);
  f << 0, 1, 10, 11, 20, 21, 30, 31;
  const Matrix s = stack_context(f, 1);
  REQUIRE(s.rows() == 4);
  REQUIRE(s.cols() == 6);
  CHECK(s(0, 0) == 0);
  CHECK(s(0, 2) == 0);
  CHECK(s(0, 4) == 10);
  CHECK(s(2, 0) == 10);
  CHECK(s(2, 2) == 20);
  CHECK(s(2, 4) == 30);
  CHECK(s(3, 4) == 30);

  const Matrix one = stack_context(f.topRows(1), 5);
  REQUIRE(one.rows() == 1);
  REQUIRE(one.cols() == 22);
  for (int k = 0; k < 11; ++k) {
    CHECK(one(0, 2 * k) == 0);
    CHECK(one(0, 2 * k + 1) == 1);
  }
}

TEST_CASE("full front end emits T x 429 at 100 Hz") {
  Waveform w;
  w.samples.resize(16000);
  for (int i = 0; i < 16000; ++i) {
    w.samples[i] = 0.5 * std::sin(2.0 * kPi * 220.0 * i / 16000.0) *
                   (0.2 + 0.8 * std::abs(std::sin(2.0 * kPi * 2.0 * i / 16000.0)));
  }
  const AcousticSequence seq = extract_acoustic_features(w);
  CHECK(seq.frame_rate == 100.0);
  CHECK(seq.frames.rows() == 98);
  CHECK(seq.frames.cols() == 429);
  CHECK(seq.frames.allFinite());
}

}  // namespace
}  // namespace aai
