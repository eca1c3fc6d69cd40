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

#include "aai/metrics.hpp"

#include <cmath>
#include <fstream>

#include "aai/io.hpp"

namespace aai {

double pearson_cc(const Eigen::Ref<const Vector>& a,
                  const Eigen::Ref<const Vector>& y) {
  if (a.size() != y.size()) throw ShapeError("pearson_cc length mismatch");
  const Eigen::Index n = a.size();
  if (n < 2) throw UndefinedCorrelation("need at least two samples");
  const double mean_a = a.mean();
  const double mean_y = y.mean();
  double cov = 0.0;
  double var_a = 0.0;
  double var_y = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double dy = y[i] - mean_y;
    cov += da * dy;
    var_a += da * da;
    var_y += dy * dy;
  }
  if (var_a == 0.0 || var_y == 0.0) {
    throw UndefinedCorrelation("constant input sequence");
  }
  return cov / std::sqrt(var_a * var_y);
}

double rmse(const Eigen::Ref<const Vector>& a,
            const Eigen::Ref<const Vector>& y) {
  if (a.size() != y.size()) throw ShapeError("rmse length mismatch");
  if (a.size() == 0) throw ShapeError("rmse of empty sequences");
  return std::sqrt((a - y).squaredNorm() / static_cast<double>(a.size()));
}

EvalReport evaluate_trajectories(const std::vector<std::string>& ids,
                                 const std::vector<Matrix>& predicted_mm,
                                 const std::vector<Matrix>& target_mm) {
  if (ids.empty()) throw EmptyEvaluation("no utterances to evaluate");
  require(ids.size() == predicted_mm.size() && ids.size() == target_mm.size(),
          "evaluation input counts differ");
  const Eigen::Index channels = predicted_mm.front().cols();
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  EvalReport report;
  report.utterance_ids = ids;
  if (channels == kArticulatoryChannels) {
    report.channel_names.assign(kArticulatoryChannelNames.begin(),
                                kArticulatoryChannelNames.end());
  } else {
    for (Eigen::Index c = 0; c < channels; ++c) {
      report.channel_names.push_back("ch" + std::to_string(c));
    }
  }
  report.utterance_pcc.resize(n, channels);
  report.utterance_rmse.resize(n, channels);
  for (Eigen::Index u = 0; u < n; ++u) {
    const Matrix& pred = predicted_mm[static_cast<std::size_t>(u)];
    const Matrix& ref = target_mm[static_cast<std::size_t>(u)];
    require(pred.rows() == ref.rows() && pred.cols() == channels &&
                ref.cols() == channels,
            "trajectory shape mismatch for " +
                ids[static_cast<std::size_t>(u)]);
    for (Eigen::Index c = 0; c < channels; ++c) {
      report.utterance_pcc(u, c) = pearson_cc(pred.col(c), ref.col(c));
      report.utterance_rmse(u, c) = rmse(pred.col(c), ref.col(c));
    }
  }
  report.channel_pcc = report.utterance_pcc.colwise().mean().transpose();
  report.channel_rmse = report.utterance_rmse.colwise().mean().transpose();
  report.utterance_mean_pcc = report.utterance_pcc.rowwise().mean();
  report.utterance_mean_rmse = report.utterance_rmse.rowwise().mean();
  report.aggregate_pcc = report.channel_pcc.mean();
  report.aggregate_rmse = report.channel_rmse.mean();
  return report;
}

EvalReport evaluate(const InversionModel& model,
                    const std::vector<EvalItem>& items,
                    const ChannelStats& target_stats,
                    const TargetPipelineConfig& pipeline) {
  if (items.empty()) throw EmptyEvaluation("empty test set");
  if (!model.input_stats) {
    throw ConfigError("model carries no input normalization stats");
  }
  std::vector<std::string> ids;
  std::vector<Matrix> predictions;
  std::vector<Matrix> references;
  ids.reserve(items.size());
  for (const EvalItem& item : items) {
    Matrix x = zscore_fit_apply(*item.acoustic, *model.input_stats).first;
    ForwardResult out = model_forward(model, x);
    predictions.push_back(zscore_inverse(out.smoothed, target_stats));
    ArticulatorySequence stage1;
    stage1.frames = *item.target_mm;
    ArticulatorySequence ref = finalize_targets(stage1, target_stats, pipeline);
    references.push_back(zscore_inverse(ref.frames, target_stats));
    ids.push_back(item.id);
  }
  return evaluate_trajectories(ids, predictions, references);
}

void write_eval_report(const std::filesystem::path& path,
                       const EvalReport& report) {
  std::string text = "channel,pcc,rmse_mm\n";
  for (std::size_t c = 0; c < report.channel_names.size(); ++c) {
    text += report.channel_names[c] + ',' +
            format_double(report.channel_pcc[static_cast<Eigen::Index>(c)]) +
            ',' +
            format_double(report.channel_rmse[static_cast<Eigen::Index>(c)]) +
            '\n';
  }
  text += "aggregate," + format_double(report.aggregate_pcc) + ',' +
          format_double(report.aggregate_rmse) + '\n';
  write_text_file(path, text);
}

void write_per_utterance_report(const std::filesystem::path& path,
                                const EvalReport& report) {
  std::string text = "utterance,mean_pcc,mean_rmse_mm";
  for (const std::string& name : report.channel_names) {
    text += ",pcc_" + name;
  }
  text += '\n';
  for (std::size_t u = 0; u < report.utterance_ids.size(); ++u) {
    const auto row = static_cast<Eigen::Index>(u);
    text += report.utterance_ids[u] + ',' +
            format_double(report.utterance_mean_pcc[row]) + ',' +
            format_double(report.utterance_mean_rmse[row]);
    for (Eigen::Index c = 0; c < report.utterance_pcc.cols(); ++c) {
      text += ',' + format_double(report.utterance_pcc(row, c));
    }
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace aai
