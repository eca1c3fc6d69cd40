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

#include "aai/training.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

namespace aai {
namespace {

using testing::TempDir;

CorpusManifest fake_manifest(const std::string& corpus, int n_speakers,
                             int utterances_per_speaker) {
  CorpusManifest m;
  m.corpus = corpus;
  for (int s = 0; s < n_speakers; ++s) {
    const std::string spk = corpus + "_spk" + std::to_string(s);
    m.speakers.push_back({spk, "synthetic", 100.0});
    for (int u = 0; u < utterances_per_speaker; ++u) {
      UtteranceInfo info;
      info.id = spk + "_utt" + std::to_string(u);
      info.speaker = spk;
      info.audio = "audio/" + info.id + ".wav";
      info.ema = "ema/" + info.id + ".csv";
      info.duration_s = 2.0;
      m.utterances.push_back(info);
    }
  }
  return m;
}

std::set<std::string> speaker_of_ids(const CorpusManifest& m,
                                     const std::vector<std::string>& ids) {
  std::set<std::string> speakers;
  for (const UtteranceInfo& u : m.utterances) {
    if (std::find(ids.begin(), ids.end(), u.id) != ids.end()) {
      speakers.insert(u.speaker);
    }
  }
  return speakers;
}

TEST_CASE("split mode parsing round-trips") {
  CHECK(parse_split_mode("SD") == SplitMode::sd);
  CHECK(parse_split_mode("SI") == SplitMode::si);
  CHECK(parse_split_mode("CD") == SplitMode::cd);
  CHECK(parse_split_mode("CC") == SplitMode::cc);
  CHECK(format_split_mode(SplitMode::si) == "SI");
  CHECK_THROWS_AS(parse_split_mode("XY"), ConfigError);
}

TEST_CASE("speaker-dependent split cuts round(0.7 n) / round(0.1 n) / rest") {
  const CorpusManifest m = fake_manifest("big", 1, 460);
  ExperimentConfig cfg;
  cfg.mode = SplitMode::sd;
  const DataSplit split = make_split({m}, cfg);
  CHECK(split.train.size() == 322);
  CHECK(split.validation.size() == 46);
  CHECK(split.test.size() == 92);

  std::set<std::string> all;
  all.insert(split.train.begin(), split.train.end());
  all.insert(split.validation.begin(), split.validation.end());
  all.insert(split.test.begin(), split.test.end());
  CHECK(all.size() == 460);
}

TEST_CASE("splits are seed-deterministic") {
  const CorpusManifest m = fake_manifest("c", 2, 20);
  ExperimentConfig cfg;
  cfg.mode = SplitMode::sd;
  cfg.seed = 5;
  const DataSplit a = make_split({m}, cfg);
  const DataSplit b = make_split({m}, cfg);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);

  cfg.seed = 6;
  const DataSplit c = make_split({m}, cfg);
  CHECK(a.train != c.train);
}

TEST_CASE("speaker-independent split holds out the last speaker") {
  const CorpusManifest m = fake_manifest("c", 3, 10);
  ExperimentConfig cfg;
  cfg.mode = SplitMode::si;
  const DataSplit split = make_split({m}, cfg);
  CHECK(split.train.size() == 14);
  CHECK(split.validation.size() == 2);
  CHECK(split.test.size() == 10);

  const auto test_speakers = speaker_of_ids(m, split.test);
  REQUIRE(test_speakers.size() == 1);
  CHECK(*test_speakers.begin() == "c_spk2");
  const auto train_speakers = speaker_of_ids(m, split.train);
  CHECK(train_speakers.count("c_spk2") == 0);

  cfg.speaker = "c_spk0";
  const DataSplit held = make_split({m}, cfg);
  CHECK(speaker_of_ids(m, held.test) == std::set<std::string>{"c_spk0"});

  cfg.speaker = "nobody";
  CHECK_THROWS_AS(make_split({m}, cfg), SelectorError);
}

TEST_CASE("cross-corpus split tests on the whole second corpus") {
  const CorpusManifest a = fake_manifest("alpha", 2, 5);
  const CorpusManifest b = fake_manifest("beta", 1, 4);
  ExperimentConfig cfg;
  cfg.mode = SplitMode::cc;
  const DataSplit split = make_split({a, b}, cfg);
  CHECK(split.train.size() == 7);
  CHECK(split.validation.size() == 1);
  CHECK(split.test.size() == 4);
  for (const std::string& id : split.test) {
    CHECK(id.rfind("beta_", 0) == 0);
  }

  cfg.train_corpus = "beta";
  cfg.test_corpus = "beta";
  CHECK_THROWS_AS(make_split({a, b}, cfg), SelectorError);

  cfg.train_corpus.clear();
  cfg.test_corpus.clear();
  CHECK_THROWS_AS(make_split({a}, cfg), SelectorError);
}

TEST_CASE("corpus-dependent split stays inside one corpus") {
  const CorpusManifest a = fake_manifest("alpha", 2, 5);
  const CorpusManifest b = fake_manifest("beta", 1, 4);
  ExperimentConfig cfg;
  cfg.mode = SplitMode::cd;
  const DataSplit split = make_split({a, b}, cfg);
  CHECK(split.train.size() == 7);
  CHECK(split.validation.size() == 1);
  CHECK(split.test.size() == 2);
  for (const std::string& id : split.test) {
    CHECK(id.rfind("alpha_", 0) == 0);
  }
}

TEST_CASE("validate_config rejects inconsistent settings") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(validate_config(cfg));

  ExperimentConfig bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = cfg;
  bad.patience = bad.max_epochs;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = cfg;
  bad.model.hidden_per_direction = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = cfg;
  bad.train_corpus = "alpha";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = cfg;
  bad.mode = SplitMode::cd;
  bad.speaker = "spk0";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = cfg;
  bad.mode = SplitMode::cd;
  bad.test_corpus = "beta";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("experiment config JSON round-trips and rejects unknown keys") {
  ExperimentConfig cfg;
  cfg.mode = SplitMode::cc;
  cfg.train_corpus = "alpha";
  cfg.test_corpus = "beta";
  cfg.model.dense_units = 32;
  cfg.model.hidden_per_direction = 16;
  cfg.smoother = SmootherMode::adaptive;
  cfg.pipeline.lip_aperture_formula = LipApertureFormula::euclidean;
  cfg.batch_size = 4;
  cfg.max_epochs = 12;
  cfg.patience = 3;
  cfg.learning_rate = 0.004;
  cfg.seed = 17;
  cfg.shuffle_labels = true;

  const std::string text = experiment_config_to_json_text(cfg);
  const ExperimentConfig back = parse_experiment_config_text(text);
  CHECK(back.mode == cfg.mode);
  CHECK(back.train_corpus == cfg.train_corpus);
  CHECK(back.test_corpus == cfg.test_corpus);
  CHECK(back.model == cfg.model);
  CHECK(back.smoother == cfg.smoother);
  CHECK(back.pipeline.lip_aperture_formula ==
        cfg.pipeline.lip_aperture_formula);
  CHECK(back.batch_size == cfg.batch_size);
  CHECK(back.max_epochs == cfg.max_epochs);
  CHECK(back.patience == cfg.patience);
  CHECK(back.learning_rate == cfg.learning_rate);
  CHECK(back.seed == cfg.seed);
  CHECK(back.shuffle_labels == cfg.shuffle_labels);

  CHECK_THROWS_AS(parse_experiment_config_text("{\"modee\": \"SD\"}"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_experiment_config_text("{\"model\": {\"units\": 4}}"),
      ConfigError);
  CHECK_THROWS_AS(parse_experiment_config_text("not json"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config_text("{\"smoother\": \"loose\"}"),
                  ConfigError);
}

TEST_CASE("make_batches groups by length and pads with masked zeros") {
  std::vector<Matrix> acoustics;
  std::vector<Matrix> targets;
  std::vector<TrainingExample> examples;
  acoustics.reserve(20);
  targets.reserve(20);
  for (int i = 0; i < 20; ++i) {
    const int len = 5 + (i * 7) % 13;
    acoustics.push_back(Matrix::Constant(len, 3, 1.0 + i));
    targets.push_back(Matrix::Constant(len, 2, -1.0 - i));
  }
  for (int i = 0; i < 20; ++i) {
    examples.push_back(
        {"utt" + std::to_string(i), &acoustics[i], &targets[i]});
  }

  const std::vector<Batch> batches = make_batches(examples, 8, 7, 0);
  REQUIRE(batches.size() == 3);
  std::multiset<std::size_t> sizes;
  std::set<std::string> seen;
  for (const Batch& batch : batches) {
    sizes.insert(batch.ids.size());
    CHECK(std::is_sorted(batch.lengths.begin(), batch.lengths.end()));
    const long padded = batch.acoustics[0].rows();
    for (std::size_t i = 0; i < batch.ids.size(); ++i) {
      seen.insert(batch.ids[i]);
      CHECK(batch.acoustics[i].rows() == padded);
      CHECK(batch.targets[i].rows() == padded);
      long mask_sum = 0;
      for (std::uint8_t b : batch.masks[i]) mask_sum += b;
      CHECK(mask_sum == batch.lengths[i]);
      if (batch.lengths[i] < padded) {
        CHECK(batch.acoustics[i]
                  .bottomRows(padded - batch.lengths[i])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
      }
    }
    CHECK(padded == batch.lengths.back());
  }
  CHECK(sizes == std::multiset<std::size_t>{8, 8, 4});
  CHECK(seen.size() == 20);

  const std::vector<Batch> same = make_batches(examples, 8, 7, 0);
  CHECK(same[0].ids == batches[0].ids);
  CHECK(same[1].ids == batches[1].ids);

  auto flat_ids = [](const std::vector<Batch>& bs) {
    std::vector<std::string> ids;
    for (const Batch& b : bs) {
      ids.insert(ids.end(), b.ids.begin(), b.ids.end());
    }
    return ids;
  };
  const auto epoch0 = flat_ids(make_batches(examples, 2, 7, 0));
  const auto epoch1 = flat_ids(make_batches(examples, 2, 7, 1));
  CHECK(epoch0 != epoch1);
}

TEST_CASE("masked_mse averages valid entries only") {
  std::vector<Matrix> pred = {Matrix::Zero(3, 2)};
  std::vector<Matrix> target = {Matrix::Zero(3, 2)};
  pred[0] << 1, 2, 3, 4, 100, 200;
  target[0] << 0, 0, 0, 0, 0, 0;
  std::vector<std::vector<std::uint8_t>> masks = {{1, 1, 0}};
  CHECK(masked_mse(pred, target, masks) ==
        doctest::Approx((1.0 + 4.0 + 9.0 + 16.0) / 4.0).epsilon(1e-15));

  pred[0](2, 0) = 1e9;
  CHECK(masked_mse(pred, target, masks) ==
        doctest::Approx(7.5).epsilon(1e-15));

  masks[0] = {0, 0, 0};
  CHECK_THROWS_AS(masked_mse(pred, target, masks), EmptyBatch);
}

TEST_CASE("adam takes the textbook bias-corrected step") {
  ModelConfig cfg;
  cfg.input_dim = 3;
  cfg.dense_units = 2;
  cfg.hidden_per_direction = 2;
  cfg.output_channels = 2;
  cfg.smoother_taps = 3;
  InversionModel model = init_model(cfg, 1, SmootherMode::fixed);
  const InversionModel before = model;

  ModelGradients grads = zero_gradients(model);
  for (TensorView& tv : gradient_tensors(grads)) {
    for (long k = 0; k < tv.size; ++k) tv.data[k] = 1.0;
  }
  AdamState state = make_adam_state(model);
  AdamConfig adam;
  adam.learning_rate = 1e-3;

  optimizer_step(model, grads, state, adam);
  optimizer_step(model, grads, state, adam);

  const double expected_delta = -2.0 * 1e-3 / (1.0 + 1e-8);
  const auto now = parameter_tensors(model);
  const auto old = parameter_tensors(before);
  REQUIRE(now.size() == old.size());
  for (std::size_t i = 0; i < now.size(); ++i) {
    for (long k = 0; k < now[i].size; ++k) {
      CHECK(now[i].data[k] - old[i].data[k] ==
            doctest::Approx(expected_delta).epsilon(1e-12));
    }
  }
  CHECK(state.step == 2);
}

TEST_CASE("a frozen smoother never moves under optimization") {
  ModelConfig cfg;
  cfg.input_dim = 3;
  cfg.dense_units = 2;
  cfg.hidden_per_direction = 2;
  cfg.output_channels = 2;
  cfg.smoother_taps = 7;
  InversionModel model = init_model(cfg, 1, SmootherMode::fixed);
  const Matrix frozen_taps = model.smoother.taps;

  AdamState state = make_adam_state(model);
  AdamConfig adam;
  Rng rng(5);
  for (int step = 0; step < 100; ++step) {
    ModelGradients grads = zero_gradients(model);
    for (TensorView& tv : gradient_tensors(grads)) {
      for (long k = 0; k < tv.size; ++k) tv.data[k] = rng.normal();
    }
    optimizer_step(model, grads, state, adam);
  }
  CHECK((model.smoother.taps.array() == frozen_taps.array()).all());
}

TEST_CASE("non-finite gradients abort the step before mutation") {
  ModelConfig cfg;
  cfg.input_dim = 3;
  cfg.dense_units = 2;
  cfg.hidden_per_direction = 2;
  cfg.output_channels = 2;
  cfg.smoother_taps = 3;
  InversionModel model = init_model(cfg, 1, SmootherMode::fixed);
  const InversionModel before = model;

  ModelGradients grads = zero_gradients(model);
  gradient_tensors(grads)[0].data[0] = std::nan("");
  AdamState state = make_adam_state(model);
  CHECK_THROWS_AS(optimizer_step(model, grads, state, AdamConfig{}),
                  NumericalError);

  const auto now = parameter_tensors(model, false);
  const auto old = parameter_tensors(before, false);
  for (std::size_t i = 0; i < now.size(); ++i) {
    for (long k = 0; k < now[i].size; ++k) {
      CHECK(now[i].data[k] == old[i].data[k]);
    }
  }
  CHECK(state.step == 0);
}

TEST_CASE("early stopper waits out the full patience window") {
  EarlyStopper stopper(7);
  CHECK_FALSE(stopper.observe(1, 1.0));
  int stopped_at = 0;
  for (int epoch = 2; epoch <= 20; ++epoch) {
    if (stopper.observe(epoch, 1.0 + epoch)) {
      stopped_at = epoch;
      break;
    }
  }
  CHECK(stopped_at == 8);
  CHECK(stopper.best_epoch() == 1);
  CHECK(stopper.best_loss() == 1.0);
}

TEST_CASE("early stopper resets on strict improvement only") {
  EarlyStopper stopper(2);
  CHECK_FALSE(stopper.observe(1, 5.0));
  CHECK_FALSE(stopper.observe(2, 5.0));
  CHECK(stopper.observe(3, 5.0));
  CHECK(stopper.best_epoch() == 1);

  EarlyStopper improving(2);
  CHECK_FALSE(improving.observe(1, 5.0));
  CHECK_FALSE(improving.observe(2, 4.0));
  CHECK_FALSE(improving.observe(3, 4.5));
  CHECK_FALSE(improving.observe(4, 3.0));
  CHECK_FALSE(improving.observe(5, 3.5));
  CHECK(improving.observe(6, 3.2));
  CHECK(improving.best_epoch() == 4);
}

TEST_CASE("train report CSV lists per-epoch curves") {
  TempDir dir("aai_training");
  TrainReport report;
  report.train_loss = {0.9, 0.5, 0.3};
  report.val_loss = {1.0, 0.6, 0.4};
  report.val_pcc = {0.1, 0.4, 0.6};
  report.stop_epoch = 3;
  report.best_epoch = 3;
  report.wall_seconds = 123.0;
  const auto path = dir / "train_report.csv";
  write_train_report(path, report);
  const std::string text = testing::slurp(path);
  CHECK(text.find("epoch") != std::string::npos);
  CHECK(text.find("0.9") != std::string::npos);
  CHECK(text.find("123") == std::string::npos);

  TrainReport again = report;
  again.wall_seconds = 9999.0;
  write_train_report(dir / "again.csv", again);
  CHECK(testing::files_identical(path, dir / "again.csv"));
}

TEST_CASE("end-to-end training on a small synthetic corpus is reproducible") {
  TempDir dir("aai_training");
  SyntheticSpec spec;
  spec.corpus_name = "mini";
  spec.n_speakers = 1;
  spec.utterances_per_speaker = 10;
  spec.min_duration_s = 1.0;
  spec.max_duration_s = 1.2;
  spec.seed = 11;
  const auto manifest_path = generate_synthetic_corpus(spec, dir / "mini");

  const Corpus corpus = load_corpus(manifest_path);
  const PreparedDataset data = prepare_dataset({corpus});
  REQUIRE(data.utterances.size() == 10);

  ExperimentConfig cfg;
  cfg.mode = SplitMode::sd;
  cfg.model.dense_units = 8;
  cfg.model.hidden_per_direction = 4;
  cfg.batch_size = 4;
  cfg.max_epochs = 3;
  cfg.patience = 2;
  cfg.seed = 5;

  const TrainResult first = train(cfg, data);
  CHECK(first.report.stop_epoch == 3);
  CHECK(static_cast<int>(first.report.train_loss.size()) ==
        first.report.stop_epoch);
  CHECK(static_cast<int>(first.report.val_loss.size()) ==
        first.report.stop_epoch);
  CHECK(first.report.best_epoch >= 1);
  CHECK(first.report.best_epoch <= first.report.stop_epoch);
  for (double v : first.report.val_pcc) CHECK(std::isfinite(v));
  CHECK(first.split.train.size() == 7);
  CHECK(first.split.validation.size() == 1);
  CHECK(first.split.test.size() == 2);
  REQUIRE(first.model.input_stats.has_value());
  REQUIRE(first.model.target_stats.has_value());

  const TrainResult second = train(cfg, data);
  const auto ta = parameter_tensors(first.model, false);
  const auto tb = parameter_tensors(second.model, false);
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (long k = 0; k < ta[i].size; ++k) {
      CHECK(ta[i].data[k] == tb[i].data[k]);
    }
  }
  CHECK(first.report.val_loss == second.report.val_loss);

  ExperimentConfig shuffled = cfg;
  shuffled.shuffle_labels = true;
  const TrainResult control = train(shuffled, data);
  CHECK(control.report.val_loss != first.report.val_loss);
}

TEST_CASE("training surfaces numerical blowups with the epoch prefix") {
  TempDir dir("aai_training");
  SyntheticSpec spec;
  spec.corpus_name = "mini";
  spec.n_speakers = 1;
  spec.utterances_per_speaker = 10;
  spec.min_duration_s = 1.0;
  spec.max_duration_s = 1.1;
  spec.seed = 12;
  const auto manifest_path = generate_synthetic_corpus(spec, dir / "mini");
  const PreparedDataset data = prepare_dataset({load_corpus(manifest_path)});

  ExperimentConfig cfg;
  cfg.model.dense_units = 8;
  cfg.model.hidden_per_direction = 4;
  cfg.batch_size = 4;
  cfg.max_epochs = 4;
  cfg.patience = 2;
  cfg.learning_rate = 1e300;

  try {
    train(cfg, data);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

}  // namespace
}  // namespace aai
