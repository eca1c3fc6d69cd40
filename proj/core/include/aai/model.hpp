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
// Inversion network: dense + ReLU, two stacked bidirectional LSTM layers,
// dense projection to 16 channels, and a depthwise smoothing convolution
// whose taps are either a frozen windowed-sinc kernel or trainable.
// Backpropagation through time is implemented here, batched over sequences
// of unequal length.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aai/common.hpp"
#include "aai/ema.hpp"

namespace aai {

struct ModelConfig {
  int input_dim = 429;
  int dense_units = 400;
  int hidden_per_direction = 200;
  int output_channels = 16;
  int smoother_taps = 50;
  bool per_channel_smoother = false;

  bool operator==(const ModelConfig&) const = default;
};

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;
};

struct LstmCellParams {
  // hidden x (hidden + input); recurrent block in the left columns.
  Matrix w_f, w_i, w_c, w_o;
  Vector b_f, b_i, b_c, b_o;
};

struct BiLstmLayer {
  LstmCellParams forward_cell;
  LstmCellParams backward_cell;
  int hidden_per_direction = 0;
};

struct SmoothingConv {
  Matrix taps;  // taps x 1 (shared) or taps x channels
  bool frozen = false;
};

enum class SmootherMode { fixed, adaptive };

struct InversionModel {
  ModelConfig config;
  DenseLayer input_dense;
  BiLstmLayer bilstm1;
  BiLstmLayer bilstm2;
  DenseLayer output_dense;
  SmoothingConv smoother;
  std::uint64_t seed = 0;
  std::optional<ChannelStats> input_stats;   // acoustic z-score, train-fitted
  std::optional<ChannelStats> target_stats;  // articulatory z-score
};

long parameter_count(const InversionModel& model);

struct TensorView {
  std::string name;
  double* data;
  long size;
};

struct ConstTensorView {
  std::string name;
  const double* data;
  long size;
};

// Every parameter tensor in a fixed order. With skip_frozen, a frozen
// smoother is left out, which makes the enumeration line up with
// gradient_tensors for the optimizer.
std::vector<TensorView> parameter_tensors(InversionModel& model,
                                          bool skip_frozen = true);
std::vector<ConstTensorView> parameter_tensors(const InversionModel& model,
                                               bool skip_frozen = true);

// Gradient holder with the same tensor shapes as the model. The smoother
// entry is absent when the smoother is frozen.
struct ModelGradients {
  DenseLayer input_dense;
  BiLstmLayer bilstm1;
  BiLstmLayer bilstm2;
  DenseLayer output_dense;
  std::optional<Matrix> smoother_taps;
};

ModelGradients zero_gradients(const InversionModel& model);
void scale_gradients(ModelGradients& grads, double factor);
std::vector<TensorView> gradient_tensors(ModelGradients& grads);
std::vector<ConstTensorView> gradient_tensors(const ModelGradients& grads);

// One LSTM cell update:
//   f = sigmoid(W_f [h_prev; x] + b_f)    i = sigmoid(W_i [h_prev; x] + b_i)
//   c~ = tanh(W_c [h_prev; x] + b_c)      o = sigmoid(W_o [h_prev; x] + b_o)
//   c = f . c_prev + i . c~               h = o . tanh(c)
void lstm_step(const LstmCellParams& params,
               const Eigen::Ref<const Vector>& h_prev,
               const Eigen::Ref<const Vector>& c_prev,
               const Eigen::Ref<const Vector>& x, Vector& h, Vector& c);

// Row t = concat(forward h_t, backward h_t), both scans from zero state.
Matrix bilstm_forward(const BiLstmLayer& layer, const Matrix& seq);

struct ForwardResult {
  Matrix raw;       // T x channels, pre-smoothing
  Matrix smoothed;  // T x channels
};

ForwardResult model_forward(const InversionModel& model, const Matrix& seq);

// The first `length` rows of *data are the sequence; trailing rows are
// padding and do not influence any output or gradient.
struct SeqView {
  const Matrix* data;
  int length;
};

std::vector<ForwardResult> model_forward_batch(
    const InversionModel& model, const std::vector<SeqView>& inputs);

InversionModel init_model(const ModelConfig& config, std::uint64_t seed,
                          SmootherMode mode, double smoother_cutoff_hz = 25.0,
                          double frame_rate = 100.0);

struct BatchLoss {
  double sum_squared_error = 0.0;
  long valid_entries = 0;  // frames x channels contributing to the loss
};

// Adds d(sum of squared errors)/d(theta) into grads; the caller divides by
// valid_entries to obtain mean-squared-error gradients.
BatchLoss accumulate_gradients(const InversionModel& model,
                               const std::vector<SeqView>& inputs,
                               const std::vector<SeqView>& targets,
                               ModelGradients& grads);

// Gradients of the masked MSE over the smoothed output of one sequence.
// mask[t] == 0 excludes frame t from the loss; an all-zero mask yields
// all-zero gradients.
ModelGradients compute_gradients(const InversionModel& model,
                                 const Matrix& seq, const Matrix& target,
                                 const std::vector<std::uint8_t>& mask);

// Versioned binary container: architecture constants, freeze flag, seed,
// named tensors, normalization stats.
void save_model(const std::filesystem::path& path,
                const InversionModel& model);
InversionModel load_model(const std::filesystem::path& path);

}  // namespace aai
