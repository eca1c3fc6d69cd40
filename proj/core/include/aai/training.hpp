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
// Dataset partitioning (speaker-dependent, speaker-independent,
// corpus-dependent, cross-corpus), length-bucketed batching, Adam with
// early stopping and restore-best, and an experiment grid runner.

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aai/common.hpp"
#include "aai/corpus.hpp"
#include "aai/ema.hpp"
#include "aai/model.hpp"

namespace aai {

enum class SplitMode { sd, si, cd, cc };

SplitMode parse_split_mode(const std::string& text);  // "SD" | "SI" | ...
std::string format_split_mode(SplitMode mode);

struct ExperimentConfig {
  SplitMode mode = SplitMode::sd;
  // SD: the speaker to train and test on; SI: the held-out test speaker.
  // Empty selects the first (SD) or last (SI) speaker in manifest order.
  std::string speaker;
  // CD: the corpus to stay within; CC: train corpus. Empty selects the
  // first manifest. test_corpus (CC only) defaults to the second manifest.
  std::string train_corpus;
  std::string test_corpus;

  ModelConfig model;
  SmootherMode smoother = SmootherMode::fixed;
  TargetPipelineConfig pipeline;

  int batch_size = 8;
  int max_epochs = 50;
  int patience = 7;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  // Control run: permutes target frames within each train/val utterance,
  // destroying the acoustic-articulatory correspondence.
  bool shuffle_labels = false;
};

void validate_config(const ExperimentConfig& cfg);

// Round-trip JSON form. Unknown keys are rejected.
ExperimentConfig parse_experiment_config_text(const std::string& text);
std::string experiment_config_to_json_text(const ExperimentConfig& cfg);

struct DataSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Partitions utterance ids. SD/CD shuffle the unit's utterances and cut
// round(0.7 n) / round(0.1 n) / rest. SI trains on a 70/10 cut of the
// pooled remaining speakers and tests on every utterance of the held-out
// speaker. CC cuts 70/10 within the train corpus and tests on all of the
// test corpus. Unknown selector names raise SelectorError.
DataSplit make_split(const std::vector<CorpusManifest>& manifests,
                     const ExperimentConfig& cfg);

struct TrainingExample {
  std::string id;
  const Matrix* acoustic;  // T x input_dim, already normalized
  const Matrix* target;    // T x channels, already normalized
};

struct Batch {
  std::vector<std::string> ids;
  std::vector<int> lengths;
  std::vector<Matrix> acoustics;  // padded to the batch max length
  std::vector<Matrix> targets;
  std::vector<std::vector<std::uint8_t>> masks;  // 1 = valid frame
};

// Sorts by (length, id), groups consecutively into batches, then shuffles
// the batch order with derive_seed(seed, epoch). batch_size 1 reproduces
// unbatched training.
std::vector<Batch> make_batches(const std::vector<TrainingExample>& examples,
                                int batch_size, std::uint64_t seed, int epoch);

// Mean squared error over valid frames and channels. All-masked input
// raises EmptyBatch.
double masked_mse(const std::vector<Matrix>& pred,
                  const std::vector<Matrix>& target,
                  const std::vector<std::vector<std::uint8_t>>& masks);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  long step = 0;
  std::vector<Vector> m;  // one slot per trainable tensor
  std::vector<Vector> v;
};

AdamState make_adam_state(const InversionModel& model);

// Bias-corrected Adam over the trainable tensors. A frozen smoother is not
// enumerated and therefore never moves. Non-finite gradients raise
// NumericalError.
void optimizer_step(InversionModel& model, const ModelGradients& grads,
                    AdamState& state, const AdamConfig& cfg);

// Stops once the validation loss has not strictly improved for `patience`
// consecutive epochs.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Returns true when training should stop at this epoch.
  bool observe(int epoch, double val_loss) {
    if (val_loss < best_loss_) {
      best_loss_ = val_loss;
      best_epoch_ = epoch;
      since_best_ = 0;
      return false;
    }
    ++since_best_;
    return since_best_ >= patience_;
  }

  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  int patience_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int since_best_ = 0;
};

struct TrainReport {
  std::vector<double> train_loss;  // one entry per completed epoch
  std::vector<double> val_loss;
  std::vector<double> val_pcc;
  int stop_epoch = 0;
  int best_epoch = 0;
  double wall_seconds = 0.0;  // informational; never written to artifacts
};

// Epoch curves as CSV. Wall time is excluded so the file is deterministic.
void write_train_report(const std::filesystem::path& path,
                        const TrainReport& report);

struct PreparedUtterance {
  std::string id;
  std::string speaker;
  std::string corpus;
  Matrix acoustic;       // T x 429, un-normalized
  Matrix target_mm;      // T x 16, un-normalized (stage-one targets)
};

struct PreparedDataset {
  std::vector<CorpusManifest> manifests;
  std::vector<PreparedUtterance> utterances;

  const PreparedUtterance& by_id(const std::string& id) const;
};

// Acoustic features and stage-one targets for every utterance, resampled to
// the acoustic frame count. Normalization happens later, per split.
PreparedDataset prepare_dataset(const std::vector<Corpus>& corpora,
                                const TargetPipelineConfig& pipeline = {});

struct TrainResult {
  InversionModel model;  // best-validation-epoch parameters
  TrainReport report;
  DataSplit split;
};

TrainResult train(const ExperimentConfig& cfg, const PreparedDataset& data);

struct GridRow {
  ExperimentConfig cfg;
  bool ok = false;
  std::string error;
  double rmse_mm = std::numeric_limits<double>::quiet_NaN();
  double pcc = std::numeric_limits<double>::quiet_NaN();
  int stop_epoch = 0;
};

// Trains and evaluates each config; a failing config is recorded and the
// grid continues. Datasets are prepared once per distinct pipeline.
std::vector<GridRow> run_experiment_grid(
    const std::vector<ExperimentConfig>& cfgs,
    const std::vector<Corpus>& corpora);

// Columns: mode,batch,smoother,rmse_mm,pcc,stop_epoch
void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<GridRow>& rows);

}  // namespace aai
