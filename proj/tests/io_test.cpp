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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

namespace aai {
namespace {

using testing::TempDir;

TEST_CASE("format_double round-trips exactly") {
  Rng rng(71);
  for (int i = 0; i < 2000; ++i) {
    double value = 0.0;
    switch (i % 4) {
      case 0: value = rng.normal(); break;
      case 1: value = rng.normal() * 1e12; break;
      case 2: value = rng.normal() * 1e-12; break;
      case 3: value = rng.uniform(-1.0, 1.0) * 1e300; break;
    }
    CHECK(parse_double(format_double(value)) == value);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(parse_double(format_double(std::numeric_limits<double>::min())) ==
        std::numeric_limits<double>::min());
}

TEST_CASE("matrix csv round-trips bit-exactly") {
  TempDir dir("aai_io");
  Matrix m(7, 5);
  Rng rng(9);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.normal() * 1e3;
  }
  const auto path = dir / "m.csv";
  write_matrix_csv(path, m, {"# comment line", "# another"});
  std::vector<std::string> header;
  const Matrix back = read_matrix_csv(path, &header);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK((back.array() == m.array()).all());
  REQUIRE(header.size() == 2);
  CHECK(header[0] == "# comment line");
}

TEST_CASE("matrix csv rejects ragged rows and missing files") {
  TempDir dir("aai_io");
  testing::spit(dir / "ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_AS(read_matrix_csv(dir / "ragged.csv"), LoadError);
  CHECK_THROWS_AS(read_matrix_csv(dir / "absent.csv"), LoadError);
  testing::spit(dir / "bad.csv", "1,zzz\n");
  CHECK_THROWS_AS(read_matrix_csv(dir / "bad.csv"), LoadError);
}

TEST_CASE("feature csv carries utterance id and frame rate") {
  TempDir dir("aai_io");
  Matrix m(4, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const auto path = dir / "f.csv";
  write_feature_csv(path, m, "spk0_utt3", 100.0);
  const FeatureCsv back = read_feature_csv(path);
  CHECK(back.utterance == "spk0_utt3");
  CHECK(back.frame_rate == 100.0);
  CHECK((back.values.array() == m.array()).all());

  testing::spit(dir / "plain.csv", "1,2\n3,4\n");
  CHECK_THROWS_AS(read_feature_csv(dir / "plain.csv"), SchemaError);
}

TEST_CASE("ema csv enforces the canonical channel header") {
  TempDir dir("aai_io");
  Matrix m(6, kEmaChannels);
  Rng rng(4);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-30.0, 30.0);
  }
  const auto path = dir / "e.csv";
  write_ema_csv(path, m);
  const Matrix back = read_ema_csv(path);
  CHECK((back.array() == m.array()).all());

  std::string text = testing::slurp(path);
  const auto pos = text.find("TT_x");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 4, "XX_x");
  testing::spit(dir / "renamed.csv", text);
  CHECK_THROWS_AS(read_ema_csv(dir / "renamed.csv"), SchemaError);
}

TEST_CASE("wav round-trips 16-bit quantized samples") {
  TempDir dir("aai_io");
  std::vector<double> samples(2000);
  Rng rng(5);
  for (double& s : samples) {
    s = std::round(rng.uniform(-0.9, 0.9) * 32767.0) / 32767.0;
  }
  const auto path = dir / "a.wav";
  write_wav(path, samples, 16000);
  const WavData back = read_wav(path);
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == samples.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    max_err = std::max(max_err, std::abs(back.samples[i] - samples[i]));
  }
  CHECK(max_err <= 1.0 / 32767.0);
}

TEST_CASE("wav loader rejects non-wav and truncated input") {
  TempDir dir("aai_io");
  testing::spit(dir / "not.wav", "this is not a riff container");
  CHECK_THROWS_AS(read_wav(dir / "not.wav"), LoadError);

  std::vector<double> samples(100, 0.25);
  write_wav(dir / "ok.wav", samples, 16000);
  const std::string full = testing::slurp(dir / "ok.wav");
  testing::spit(dir / "cut.wav", full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(read_wav(dir / "cut.wav"), LoadError);

  CHECK_THROWS_AS(write_wav(dir / "bad.wav", samples, 0), ConfigError);
}

TEST_CASE("channel stats round-trip") {
  TempDir dir("aai_io");
  ChannelStats stats;
  stats.mean = Vector::LinSpaced(16, -3.0, 12.0);
  stats.stdev = Vector::LinSpaced(16, 0.5, 8.0);
  const auto path = dir / "stats.json";
  save_channel_stats(path, stats);
  const ChannelStats back = load_channel_stats(path);
  CHECK((back.mean.array() == stats.mean.array()).all());
  CHECK((back.stdev.array() == stats.stdev.array()).all());

  testing::spit(dir / "bad.json", "{\"mean\": [1, 2]}");
  CHECK_THROWS_AS(load_channel_stats(dir / "bad.json"), SchemaError);
}

}  // namespace
}  // namespace aai
