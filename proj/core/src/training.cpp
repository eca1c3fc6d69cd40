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
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aai/frontend.hpp"
#include "aai/io.hpp"
#include "aai/metrics.hpp"

namespace aai {
namespace {

using nlohmann::json;

struct Cut {
  std::vector<std::string> head70;
  std::vector<std::string> mid10;
  std::vector<std::string> rest;
};

// Sorts for manifest-order independence, shuffles with the split seed, then
// cuts round(0.7 n) / round(0.1 n) / remainder.
Cut shuffle_and_cut(std::vector<std::string> ids, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  Rng rng(derive_seed(seed, 0x5917));
  rng.shuffle(ids);
  const long n = static_cast<long>(ids.size());
  const long n_train = std::lround(0.7 * static_cast<double>(n));
  const long n_val = std::lround(0.1 * static_cast<double>(n));
  Cut cut;
  cut.head70.assign(ids.begin(), ids.begin() + n_train);
  cut.mid10.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  cut.rest.assign(ids.begin() + n_train + n_val, ids.end());
  return cut;
}

std::vector<std::string> speaker_ids_in_order(
    const std::vector<CorpusManifest>& manifests) {
  std::vector<std::string> out;
  for (const CorpusManifest& m : manifests) {
    for (const SpeakerInfo& s : m.speakers) out.push_back(s.id);
  }
  return out;
}

std::vector<std::string> utterances_of_speaker(
    const std::vector<CorpusManifest>& manifests, const std::string& speaker) {
  std::vector<std::string> out;
  for (const CorpusManifest& m : manifests) {
    for (const UtteranceInfo& u : m.utterances) {
      if (u.speaker == speaker) out.push_back(u.id);
    }
  }
  return out;
}

const CorpusManifest& find_corpus(const std::vector<CorpusManifest>& manifests,
                                  const std::string& name) {
  for (const CorpusManifest& m : manifests) {
    if (m.corpus == name) return m;
  }
  throw SelectorError("unknown corpus " + name);
}

std::vector<std::string> all_ids(const CorpusManifest& m) {
  std::vector<std::string> out;
  for (const UtteranceInfo& u : m.utterances) out.push_back(u.id);
  return out;
}

const char* smoother_name(SmootherMode mode) {
  return mode == SmootherMode::fixed ? "fixed" : "adaptive";
}

SmootherMode parse_smoother(const std::string& text) {
  if (text == "fixed") return SmootherMode::fixed;
  if (text == "adaptive") return SmootherMode::adaptive;
  throw ConfigError("unknown smoother mode " + text);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown config key " + where + it.key());
    }
  }
}

}  // namespace

SplitMode parse_split_mode(const std::string& text) {
  if (text == "SD") return SplitMode::sd;
  if (text == "SI") return SplitMode::si;
  if (text == "CD") return SplitMode::cd;
  if (text == "CC") return SplitMode::cc;
  throw ConfigError("unknown split mode " + text);
}

std::string format_split_mode(SplitMode mode) {
  switch (mode) {
    case SplitMode::sd: return "SD";
    case SplitMode::si: return "SI";
    case SplitMode::cd: return "CD";
    case SplitMode::cc: return "CC";
  }
  throw ConfigError("bad split mode value");
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (cfg.patience < 1 || cfg.patience >= cfg.max_epochs) {
    throw ConfigError("patience must satisfy 1 <= patience < max_epochs");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be positive");
  }
  const ModelConfig& m = cfg.model;
  if (m.input_dim < 1 || m.dense_units < 1 || m.hidden_per_direction < 1 ||
      m.output_channels < 1 || m.smoother_taps < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  if (!(cfg.pipeline.sinc_cutoff_hz > 0.0) || cfg.pipeline.sinc_taps < 2) {
    throw ConfigError("bad smoothing pipeline settings");
  }
  const bool speaker_mode =
      cfg.mode == SplitMode::sd || cfg.mode == SplitMode::si;
  if (speaker_mode && !cfg.train_corpus.empty()) {
    throw ConfigError("corpus selectors apply to CD/CC modes only");
  }
  if (!speaker_mode && !cfg.speaker.empty()) {
    throw ConfigError("speaker selector applies to SD/SI modes only");
  }
  if (cfg.mode != SplitMode::cc && !cfg.test_corpus.empty()) {
    throw ConfigError("test_corpus applies to CC mode only");
  }
}

DataSplit make_split(const std::vector<CorpusManifest>& manifests,
                     const ExperimentConfig& cfg) {
  if (manifests.empty()) throw SelectorError("no corpora given");
  const std::vector<std::string> speakers = speaker_ids_in_order(manifests);
  if (speakers.empty()) throw SelectorError("no speakers in manifests");
  DataSplit split;
  switch (cfg.mode) {
    case SplitMode::sd: {
      const std::string who = cfg.speaker.empty() ? speakers.front()
                                                  : cfg.speaker;
      if (std::find(speakers.begin(), speakers.end(), who) == speakers.end()) {
        throw SelectorError("unknown speaker " + who);
      }
      Cut cut = shuffle_and_cut(utterances_of_speaker(manifests, who),
                                cfg.seed);
      split.train = std::move(cut.head70);
      split.validation = std::move(cut.mid10);
      split.test = std::move(cut.rest);
      break;
    }
    case SplitMode::si: {
      const std::string held = cfg.speaker.empty() ? speakers.back()
                                                   : cfg.speaker;
      if (std::find(speakers.begin(), speakers.end(), held) ==
          speakers.end()) {
        throw SelectorError("unknown speaker " + held);
      }
      split.test = utterances_of_speaker(manifests, held);
      std::sort(split.test.begin(), split.test.end());
      std::vector<std::string> pool;
      for (const std::string& s : speakers) {
        if (s == held) continue;
        for (std::string& id : utterances_of_speaker(manifests, s)) {
          pool.push_back(std::move(id));
        }
      }
      Cut cut = shuffle_and_cut(std::move(pool), cfg.seed);
      split.train = std::move(cut.head70);
      split.validation = std::move(cut.mid10);
      break;
    }
    case SplitMode::cd: {
      const std::string name =
          cfg.train_corpus.empty() ? manifests.front().corpus
                                   : cfg.train_corpus;
      Cut cut = shuffle_and_cut(all_ids(find_corpus(manifests, name)),
                                cfg.seed);
      split.train = std::move(cut.head70);
      split.validation = std::move(cut.mid10);
      split.test = std::move(cut.rest);
      break;
    }
    case SplitMode::cc: {
      const std::string train_name =
          cfg.train_corpus.empty() ? manifests.front().corpus
                                   : cfg.train_corpus;
      std::string test_name = cfg.test_corpus;
      if (test_name.empty()) {
        if (manifests.size() < 2) {
          throw SelectorError("cross-corpus mode needs a second corpus");
        }
        test_name = manifests[1].corpus;
      }
      if (train_name == test_name) {
        throw SelectorError("cross-corpus train and test corpora must differ");
      }
      Cut cut = shuffle_and_cut(all_ids(find_corpus(manifests, train_name)),
                                cfg.seed);
      split.train = std::move(cut.head70);
      split.validation = std::move(cut.mid10);
      split.test = all_ids(find_corpus(manifests, test_name));
      std::sort(split.test.begin(), split.test.end());
      break;
    }
  }
  return split;
}

std::vector<Batch> make_batches(const std::vector<TrainingExample>& examples,
                                int batch_size, std::uint64_t seed,
                                int epoch) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  std::vector<const TrainingExample*> order;
  order.reserve(examples.size());
  for (const TrainingExample& e : examples) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const TrainingExample* a, const TrainingExample* b) {
              if (a->acoustic->rows() != b->acoustic->rows()) {
                return a->acoustic->rows() < b->acoustic->rows();
              }
              return a->id < b->id;
            });
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t stop =
        std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    Batch batch;
    long t_max = 0;
    for (std::size_t i = start; i < stop; ++i) {
      t_max = std::max(t_max, order[i]->acoustic->rows());
    }
    for (std::size_t i = start; i < stop; ++i) {
      const TrainingExample& e = *order[i];
      const int len = static_cast<int>(e.acoustic->rows());
      batch.ids.push_back(e.id);
      batch.lengths.push_back(len);
      Matrix a = Matrix::Zero(t_max, e.acoustic->cols());
      a.topRows(len) = *e.acoustic;
      batch.acoustics.push_back(std::move(a));
      Matrix t = Matrix::Zero(t_max, e.target->cols());
      t.topRows(len) = *e.target;
      batch.targets.push_back(std::move(t));
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(t_max), 0);
      std::fill(mask.begin(), mask.begin() + len, std::uint8_t{1});
      batch.masks.push_back(std::move(mask));
    }
    batches.push_back(std::move(batch));
  }
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
  rng.shuffle(batches);
  return batches;
}

double masked_mse(const std::vector<Matrix>& pred,
                  const std::vector<Matrix>& target,
                  const std::vector<std::vector<std::uint8_t>>& masks) {
  require(pred.size() == target.size() && pred.size() == masks.size(),
          "masked_mse batch sizes disagree");
  double sse = 0.0;
  long count = 0;
  for (std::size_t b = 0; b < pred.size(); ++b) {
    require(pred[b].rows() == target[b].rows() &&
                pred[b].cols() == target[b].cols() &&
                static_cast<std::size_t>(pred[b].rows()) == masks[b].size(),
            "masked_mse shapes disagree");
    for (long t = 0; t < pred[b].rows(); ++t) {
      if (!masks[b][static_cast<std::size_t>(t)]) continue;
      sse += (pred[b].row(t) - target[b].row(t)).squaredNorm();
      count += pred[b].cols();
    }
  }
  if (count == 0) throw EmptyBatch("all frames masked out");
  return sse / static_cast<double>(count);
}

AdamState make_adam_state(const InversionModel& model) {
  AdamState state;
  for (const ConstTensorView& t : parameter_tensors(model)) {
    state.m.push_back(Vector::Zero(t.size));
    state.v.push_back(Vector::Zero(t.size));
  }
  return state;
}

void optimizer_step(InversionModel& model, const ModelGradients& grads,
                    AdamState& state, const AdamConfig& cfg) {
  std::vector<TensorView> params = parameter_tensors(model);
  std::vector<ConstTensorView> gs = gradient_tensors(grads);
  require(params.size() == gs.size() && params.size() == state.m.size(),
          "optimizer tensor lists disagree");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    require(params[i].size == gs[i].size, "gradient shape mismatch for " +
                                              params[i].name);
    for (long n = 0; n < gs[i].size; ++n) {
      if (!std::isfinite(gs[i].data[n])) {
        throw NumericalError("non-finite gradient in " + gs[i].name);
      }
    }
  }
  state.step += 1;
  const double bc1 =
      1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 =
      1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::Map<Vector> p(params[i].data, params[i].size);
    Eigen::Map<const Vector> g(gs[i].data, gs[i].size);
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] =
        cfg.beta2 * state.v[i].array().matrix() +
        (1.0 - cfg.beta2) * g.array().square().matrix();
    p.array() -= cfg.learning_rate * (state.m[i].array() / bc1) /
                 ((state.v[i].array() / bc2).sqrt() + cfg.epsilon);
  }
}

void write_train_report(const std::filesystem::path& path,
                        const TrainReport& report) {
  std::ostringstream out;
  out << "# stop_epoch=" << report.stop_epoch
      << " best_epoch=" << report.best_epoch << "\n";
  out << "epoch,train_loss,val_loss,val_pcc\n";
  for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
    out << (e + 1) << ',' << format_double(report.train_loss[e]) << ','
        << format_double(report.val_loss[e]) << ','
        << format_double(report.val_pcc[e]) << "\n";
  }
  write_text_file(path, out.str());
}

const PreparedUtterance& PreparedDataset::by_id(const std::string& id) const {
  for (const PreparedUtterance& u : utterances) {
    if (u.id == id) return u;
  }
  throw SchemaError("utterance " + id + " is not in the prepared dataset");
}

PreparedDataset prepare_dataset(const std::vector<Corpus>& corpora,
                                const TargetPipelineConfig& pipeline) {
  PreparedDataset data;
  std::set<std::string> seen;
  for (const Corpus& corpus : corpora) {
    data.manifests.push_back(corpus.manifest);
    for (const LoadedUtterance& u : corpus.utterances) {
      if (!seen.insert(u.info.id).second) {
        throw SchemaError("duplicate utterance id across corpora: " +
                          u.info.id);
      }
      PreparedUtterance p;
      p.id = u.info.id;
      p.speaker = u.info.speaker;
      p.corpus = corpus.manifest.corpus;
      const Waveform wave =
          normalize_waveform(u.audio.samples, u.audio.sample_rate);
      AcousticSequence ac = extract_acoustic_features(wave);
      p.acoustic = std::move(ac.frames);
      p.target_mm = build_unnormalized_targets(
                        u.ema, static_cast<int>(p.acoustic.rows()), pipeline)
                        .frames;
      data.utterances.push_back(std::move(p));
    }
  }
  return data;
}

TrainResult train(const ExperimentConfig& cfg, const PreparedDataset& data) {
  validate_config(cfg);
  const auto t_start = std::chrono::steady_clock::now();
  TrainResult result;
  result.split = make_split(data.manifests, cfg);
  if (result.split.train.empty()) throw ConfigError("empty training split");
  if (result.split.validation.empty()) {
    throw ConfigError("empty validation split");
  }

  std::vector<const PreparedUtterance*> tr, va;
  for (const std::string& id : result.split.train) {
    tr.push_back(&data.by_id(id));
  }
  for (const std::string& id : result.split.validation) {
    va.push_back(&data.by_id(id));
  }

  std::vector<Matrix> train_ac, train_tg;
  for (const PreparedUtterance* u : tr) {
    train_ac.push_back(u->acoustic);
    train_tg.push_back(u->target_mm);
  }
  // A flat acoustic feature column only lacks information; a flat target
  // channel would make the task ill-posed and stays a hard error.
  const ChannelStats in_stats = fit_channel_stats(train_ac, 1e-8);
  const ChannelStats tgt_stats = fit_channel_stats(train_tg);
  train_ac.clear();
  train_tg.clear();

  const std::size_t n_tr = tr.size(), n_va = va.size();
  std::vector<Matrix> norm_ac(n_tr + n_va), norm_tg(n_tr + n_va);
  for (std::size_t i = 0; i < n_tr + n_va; ++i) {
    const PreparedUtterance* u = i < n_tr ? tr[i] : va[i - n_tr];
    norm_ac[i] = zscore_fit_apply(u->acoustic, in_stats).first;
    norm_tg[i] = finalize_targets({u->target_mm, 100.0}, tgt_stats,
                                  cfg.pipeline)
                     .frames;
  }
  if (cfg.shuffle_labels) {
    Rng rng(derive_seed(cfg.seed, 0xC011));
    for (Matrix& tg : norm_tg) {
      std::vector<long> perm(static_cast<std::size_t>(tg.rows()));
      std::iota(perm.begin(), perm.end(), 0L);
      rng.shuffle(perm);
      Matrix shuffled(tg.rows(), tg.cols());
      for (long t = 0; t < tg.rows(); ++t) {
        shuffled.row(t) = tg.row(perm[static_cast<std::size_t>(t)]);
      }
      tg = std::move(shuffled);
    }
  }

  std::vector<TrainingExample> train_ex;
  for (std::size_t i = 0; i < n_tr; ++i) {
    train_ex.push_back({tr[i]->id, &norm_ac[i], &norm_tg[i]});
  }

  InversionModel model = init_model(cfg.model, cfg.seed, cfg.smoother,
                                    cfg.pipeline.sinc_cutoff_hz, 100.0);
  model.input_stats = in_stats;
  model.target_stats = tgt_stats;
  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  AdamState adam = make_adam_state(model);
  EarlyStopper stopper(cfg.patience);
  InversionModel best_model = model;
  TrainReport& report = result.report;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    try {
      double sse = 0.0;
      long count = 0;
      for (const Batch& batch :
           make_batches(train_ex, cfg.batch_size, cfg.seed, epoch)) {
        std::vector<SeqView> xs, ts;
        for (std::size_t b = 0; b < batch.ids.size(); ++b) {
          xs.push_back({&batch.acoustics[b], batch.lengths[b]});
          ts.push_back({&batch.targets[b], batch.lengths[b]});
        }
        ModelGradients grads = zero_gradients(model);
        const BatchLoss loss = accumulate_gradients(model, xs, ts, grads);
        if (loss.valid_entries == 0) {
          throw EmptyBatch("batch with no valid frames");
        }
        scale_gradients(grads, 1.0 / static_cast<double>(loss.valid_entries));
        optimizer_step(model, grads, adam, adam_cfg);
        sse += loss.sum_squared_error;
        count += loss.valid_entries;
      }
      report.train_loss.push_back(sse / static_cast<double>(count));

      double vsse = 0.0;
      long vcount = 0;
      double pcc_sum = 0.0;
      long pcc_n = 0;
      for (std::size_t i = n_tr; i < n_tr + n_va; ++i) {
        const ForwardResult fr = model_forward(model, norm_ac[i]);
        vsse += (fr.smoothed - norm_tg[i]).squaredNorm();
        vcount += norm_tg[i].size();
        for (long c = 0; c < norm_tg[i].cols(); ++c) {
          try {
            pcc_sum += pearson_cc(fr.smoothed.col(c), norm_tg[i].col(c));
            pcc_n += 1;
          } catch (const UndefinedCorrelation&) {
          }
        }
      }
      const double val = vsse / static_cast<double>(vcount);
      if (!std::isfinite(val)) {
        throw NumericalError("non-finite validation loss");
      }
      report.val_loss.push_back(val);
      report.val_pcc.push_back(
          pcc_n > 0 ? pcc_sum / static_cast<double>(pcc_n) : 0.0);
      report.stop_epoch = epoch;
      const bool stop = stopper.observe(epoch, val);
      if (stopper.best_epoch() == epoch) best_model = model;
      if (stop) break;
    } catch (const NumericalError& e) {
      throw NumericalError("epoch " + std::to_string(epoch) + ": " +
                           e.what());
    }
  }
  report.best_epoch = stopper.best_epoch();
  result.model = std::move(best_model);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

std::vector<GridRow> run_experiment_grid(
    const std::vector<ExperimentConfig>& cfgs,
    const std::vector<Corpus>& corpora) {
  std::vector<std::pair<TargetPipelineConfig, PreparedDataset>> cache;
  auto dataset_for = [&](const TargetPipelineConfig& p) -> PreparedDataset& {
    for (auto& entry : cache) {
      if (entry.first.sinc_cutoff_hz == p.sinc_cutoff_hz &&
          entry.first.sinc_taps == p.sinc_taps &&
          entry.first.lip_aperture_formula == p.lip_aperture_formula) {
        return entry.second;
      }
    }
    cache.emplace_back(p, prepare_dataset(corpora, p));
    return cache.back().second;
  };

  std::vector<GridRow> rows;
  for (const ExperimentConfig& cfg : cfgs) {
    GridRow row;
    row.cfg = cfg;
    try {
      const PreparedDataset& data = dataset_for(cfg.pipeline);
      TrainResult res = train(cfg, data);
      std::vector<EvalItem> items;
      for (const std::string& id : res.split.test) {
        const PreparedUtterance& u = data.by_id(id);
        items.push_back({u.id, &u.acoustic, &u.target_mm});
      }
      const EvalReport er = evaluate(res.model, items, *res.model.target_stats,
                                     cfg.pipeline);
      row.ok = true;
      row.rmse_mm = er.aggregate_rmse;
      row.pcc = er.aggregate_pcc;
      row.stop_epoch = res.report.stop_epoch;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << "mode,batch,smoother,rmse_mm,pcc,stop_epoch\n";
  for (const GridRow& row : rows) {
    out << format_split_mode(row.cfg.mode) << ',' << row.cfg.batch_size << ','
        << smoother_name(row.cfg.smoother) << ','
        << format_double(row.rmse_mm) << ',' << format_double(row.pcc) << ','
        << row.stop_epoch << "\n";
  }
  write_text_file(path, out.str());
}

ExperimentConfig parse_experiment_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(doc,
             {"mode", "speaker", "train_corpus", "test_corpus", "model",
              "pipeline", "smoother", "batch_size", "max_epochs", "patience",
              "learning_rate", "seed", "shuffle_labels"},
             "");
  ExperimentConfig cfg;
  try {
    if (doc.contains("mode")) {
      cfg.mode = parse_split_mode(doc["mode"].get<std::string>());
    }
    cfg.speaker = doc.value("speaker", cfg.speaker);
    cfg.train_corpus = doc.value("train_corpus", cfg.train_corpus);
    cfg.test_corpus = doc.value("test_corpus", cfg.test_corpus);
    if (doc.contains("smoother")) {
      cfg.smoother = parse_smoother(doc["smoother"].get<std::string>());
    }
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    cfg.max_epochs = doc.value("max_epochs", cfg.max_epochs);
    cfg.patience = doc.value("patience", cfg.patience);
    cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.shuffle_labels = doc.value("shuffle_labels", cfg.shuffle_labels);
    if (doc.contains("model")) {
      const json& m = doc["model"];
      check_keys(m,
                 {"input_dim", "dense_units", "hidden_per_direction",
                  "output_channels", "smoother_taps", "per_channel_smoother"},
                 "model.");
      cfg.model.input_dim = m.value("input_dim", cfg.model.input_dim);
      cfg.model.dense_units = m.value("dense_units", cfg.model.dense_units);
      cfg.model.hidden_per_direction =
          m.value("hidden_per_direction", cfg.model.hidden_per_direction);
      cfg.model.output_channels =
          m.value("output_channels", cfg.model.output_channels);
      cfg.model.smoother_taps =
          m.value("smoother_taps", cfg.model.smoother_taps);
      cfg.model.per_channel_smoother =
          m.value("per_channel_smoother", cfg.model.per_channel_smoother);
    }
    if (doc.contains("pipeline")) {
      const json& p = doc["pipeline"];
      check_keys(p, {"sinc_cutoff_hz", "sinc_taps", "lip_aperture"},
                 "pipeline.");
      cfg.pipeline.sinc_cutoff_hz =
          p.value("sinc_cutoff_hz", cfg.pipeline.sinc_cutoff_hz);
      cfg.pipeline.sinc_taps = p.value("sinc_taps", cfg.pipeline.sinc_taps);
      if (p.contains("lip_aperture")) {
        const std::string f = p["lip_aperture"].get<std::string>();
        if (f == "literal") {
          cfg.pipeline.lip_aperture_formula = LipApertureFormula::literal;
        } else if (f == "euclidean") {
          cfg.pipeline.lip_aperture_formula = LipApertureFormula::euclidean;
        } else {
          throw ConfigError("unknown lip_aperture formula " + f);
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

std::string experiment_config_to_json_text(const ExperimentConfig& cfg) {
  json doc;
  doc["mode"] = format_split_mode(cfg.mode);
  doc["speaker"] = cfg.speaker;
  doc["train_corpus"] = cfg.train_corpus;
  doc["test_corpus"] = cfg.test_corpus;
  doc["smoother"] = smoother_name(cfg.smoother);
  doc["batch_size"] = cfg.batch_size;
  doc["max_epochs"] = cfg.max_epochs;
  doc["patience"] = cfg.patience;
  doc["learning_rate"] = cfg.learning_rate;
  doc["seed"] = cfg.seed;
  doc["shuffle_labels"] = cfg.shuffle_labels;
  doc["model"] = {{"input_dim", cfg.model.input_dim},
                  {"dense_units", cfg.model.dense_units},
                  {"hidden_per_direction", cfg.model.hidden_per_direction},
                  {"output_channels", cfg.model.output_channels},
                  {"smoother_taps", cfg.model.smoother_taps},
                  {"per_channel_smoother", cfg.model.per_channel_smoother}};
  doc["pipeline"] = {
      {"sinc_cutoff_hz", cfg.pipeline.sinc_cutoff_hz},
      {"sinc_taps", cfg.pipeline.sinc_taps},
      {"lip_aperture",
       cfg.pipeline.lip_aperture_formula == LipApertureFormula::literal
           ? "literal"
           : "euclidean"}};
  return doc.dump(2) + "\n";
}

}  // namespace aai
