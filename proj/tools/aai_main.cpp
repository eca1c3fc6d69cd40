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
// Command-line front end: corpus synthesis, feature extraction, training,
// evaluation, prediction, and trajectory plot export. Relative paths in the
// config resolve against the working directory.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aai/common.hpp"
#include "aai/corpus.hpp"
#include "aai/ema.hpp"
#include "aai/io.hpp"
#include "aai/metrics.hpp"
#include "aai/model.hpp"
#include "aai/training.hpp"
#include "svg_plot.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aai;

// Keys consumed by the CLI itself; everything else must be a valid
// experiment-config key.
const std::set<std::string> kCliKeys = {"manifests", "model_file", "partition",
                                        "utterances", "utterance", "corpora",
                                        "grid"};

json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  json value = parse_override_value(assignment.substr(eq + 1));
  json* node = &doc;
  std::size_t start = 0;
  std::vector<std::string> parts;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (node->is_array()) {
      const std::size_t idx = std::stoul(p);
      if (idx >= node->size()) {
        throw ConfigError("--set index out of range in " + key);
      }
      node = &(*node)[idx];
    } else {
      node = &(*node)[p];
    }
  }
  if (node->is_array()) {
    const std::size_t idx = std::stoul(parts.back());
    if (idx >= node->size()) {
      throw ConfigError("--set index out of range in " + key);
    }
    (*node)[idx] = std::move(value);
  } else {
    (*node)[parts.back()] = std::move(value);
  }
}

ExperimentConfig experiment_from(const json& doc) {
  json stripped = doc;
  for (const std::string& k : kCliKeys) stripped.erase(k);
  return parse_experiment_config_text(stripped.dump());
}

std::vector<Corpus> load_corpora(const json& doc) {
  if (!doc.contains("manifests") || !doc["manifests"].is_array() ||
      doc["manifests"].empty()) {
    throw ConfigError("config needs a non-empty manifests array");
  }
  std::vector<Corpus> corpora;
  for (const json& m : doc["manifests"]) {
    corpora.push_back(load_corpus(fs::path(m.get<std::string>())));
  }
  return corpora;
}

SyntheticSpec spec_from(const json& entry) {
  static const std::set<std::string> allowed = {
      "dir",           "corpus_name",   "n_speakers",
      "utterances_per_speaker",         "min_duration_s",
      "max_duration_s", "band_limit_hz", "max_sinusoids",
      "seed",          "map_seed",      "noise_level",
      "ema_sample_rate",                "articulatory_offset_mm"};
  for (auto it = entry.begin(); it != entry.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown synthesis key " + it.key());
    }
  }
  SyntheticSpec spec;
  try {
    spec.corpus_name = entry.value("corpus_name", spec.corpus_name);
    spec.n_speakers = entry.value("n_speakers", spec.n_speakers);
    spec.utterances_per_speaker =
        entry.value("utterances_per_speaker", spec.utterances_per_speaker);
    spec.min_duration_s = entry.value("min_duration_s", spec.min_duration_s);
    spec.max_duration_s = entry.value("max_duration_s", spec.max_duration_s);
    spec.band_limit_hz = entry.value("band_limit_hz", spec.band_limit_hz);
    spec.max_sinusoids = entry.value("max_sinusoids", spec.max_sinusoids);
    spec.seed = entry.value("seed", spec.seed);
    spec.map_seed = entry.value("map_seed", spec.map_seed);
    spec.noise_level = entry.value("noise_level", spec.noise_level);
    spec.ema_sample_rate =
        entry.value("ema_sample_rate", spec.ema_sample_rate);
    if (entry.contains("articulatory_offset_mm")) {
      spec.articulatory_offset_mm =
          entry["articulatory_offset_mm"].get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad synthesis value: ") + e.what());
  }
  return spec;
}

void run_synth(const json& doc, const fs::path& out) {
  if (!doc.contains("corpora") || !doc["corpora"].is_array() ||
      doc["corpora"].empty()) {
    throw ConfigError("synth config needs a non-empty corpora array");
  }
  for (const json& entry : doc["corpora"]) {
    const SyntheticSpec spec = spec_from(entry);
    const std::string dir =
        entry.value("dir", std::string(spec.corpus_name));
    const fs::path manifest = generate_synthetic_corpus(spec, out / dir);
    std::cout << "wrote " << manifest.string() << "\n";
  }
}

void run_features(const json& doc, const fs::path& out) {
  const ExperimentConfig cfg = experiment_from(doc);
  const std::vector<Corpus> corpora = load_corpora(doc);
  const PreparedDataset data = prepare_dataset(corpora, cfg.pipeline);
  fs::create_directories(out / "features");
  for (const PreparedUtterance& u : data.utterances) {
    write_feature_csv(out / "features" / (u.id + ".acoustic.csv"), u.acoustic,
                      u.id, 100.0);
    write_feature_csv(out / "features" / (u.id + ".target_mm.csv"),
                      u.target_mm, u.id, 100.0);
  }
  std::cout << "wrote features for " << data.utterances.size()
            << " utterances\n";
}

json split_to_json(const DataSplit& split) {
  return json{{"train", split.train},
              {"validation", split.validation},
              {"test", split.test}};
}

void run_train(const json& doc, const fs::path& out) {
  const std::vector<Corpus> corpora = load_corpora(doc);
  if (doc.contains("grid")) {
    if (!doc["grid"].is_array()) throw ConfigError("grid must be an array");
    std::vector<ExperimentConfig> cfgs;
    for (const json& entry : doc["grid"]) {
      json merged = doc;
      for (const std::string& k : kCliKeys) merged.erase(k);
      merged.update(entry, true);
      cfgs.push_back(parse_experiment_config_text(merged.dump()));
    }
    const std::vector<GridRow> rows = run_experiment_grid(cfgs, corpora);
    write_grid_csv(out / "grid.csv", rows);
    for (const GridRow& row : rows) {
      if (row.ok) {
        std::cout << format_split_mode(row.cfg.mode) << " batch "
                  << row.cfg.batch_size << ": rmse_mm "
                  << format_double(row.rmse_mm) << " pcc "
                  << format_double(row.pcc) << "\n";
      } else {
        std::cout << format_split_mode(row.cfg.mode) << " batch "
                  << row.cfg.batch_size << ": failed: " << row.error << "\n";
      }
    }
    return;
  }
  const ExperimentConfig cfg = experiment_from(doc);
  const PreparedDataset data = prepare_dataset(corpora, cfg.pipeline);
  const TrainResult res = train(cfg, data);
  save_model(out / "model.bin", res.model);
  write_train_report(out / "train_report.csv", res.report);
  write_text_file(out / "split.json", split_to_json(res.split).dump(2) + "\n");
  std::cout << "stopped at epoch " << res.report.stop_epoch << ", best epoch "
            << res.report.best_epoch << ", val pcc "
            << format_double(res.report.val_pcc.back()) << "\n";
}

std::vector<std::string> partition_ids(const json& doc,
                                       const PreparedDataset& data,
                                       const ExperimentConfig& cfg) {
  if (doc.contains("utterances")) {
    return doc["utterances"].get<std::vector<std::string>>();
  }
  const std::string part = doc.value("partition", std::string("test"));
  const DataSplit split = make_split(data.manifests, cfg);
  if (part == "train") return split.train;
  if (part == "validation") return split.validation;
  if (part == "test") return split.test;
  throw ConfigError("partition must be train, validation or test");
}

InversionModel load_model_from(const json& doc) {
  if (!doc.contains("model_file")) {
    throw ConfigError("config needs model_file");
  }
  InversionModel model =
      load_model(fs::path(doc["model_file"].get<std::string>()));
  if (!model.input_stats || !model.target_stats) {
    throw ConfigError("model file lacks normalization stats");
  }
  return model;
}

void run_eval(const json& doc, const fs::path& out) {
  const ExperimentConfig cfg = experiment_from(doc);
  const InversionModel model = load_model_from(doc);
  const PreparedDataset data =
      prepare_dataset(load_corpora(doc), cfg.pipeline);
  std::vector<EvalItem> items;
  for (const std::string& id : partition_ids(doc, data, cfg)) {
    const PreparedUtterance& u = data.by_id(id);
    items.push_back({u.id, &u.acoustic, &u.target_mm});
  }
  const EvalReport report =
      evaluate(model, items, *model.target_stats, cfg.pipeline);
  write_eval_report(out / "eval_report.csv", report);
  write_per_utterance_report(out / "per_utterance.csv", report);
  std::cout << "pcc " << format_double(report.aggregate_pcc) << " rmse_mm "
            << format_double(report.aggregate_rmse) << " over "
            << items.size() << " utterances\n";
}

void run_predict(const json& doc, const fs::path& out) {
  const ExperimentConfig cfg = experiment_from(doc);
  const InversionModel model = load_model_from(doc);
  const PreparedDataset data =
      prepare_dataset(load_corpora(doc), cfg.pipeline);
  fs::create_directories(out / "predictions");
  const std::vector<std::string> ids = partition_ids(doc, data, cfg);
  for (const std::string& id : ids) {
    const PreparedUtterance& u = data.by_id(id);
    const Matrix z = zscore_fit_apply(u.acoustic, *model.input_stats).first;
    const ForwardResult fr = model_forward(model, z);
    write_feature_csv(out / "predictions" / (id + ".raw.csv"),
                      zscore_inverse(fr.raw, *model.target_stats), id, 100.0);
    write_feature_csv(out / "predictions" / (id + ".smoothed.csv"),
                      zscore_inverse(fr.smoothed, *model.target_stats), id,
                      100.0);
  }
  std::cout << "wrote predictions for " << ids.size() << " utterances\n";
}

void run_export_plot(const json& doc, const fs::path& out) {
  const ExperimentConfig cfg = experiment_from(doc);
  const InversionModel model = load_model_from(doc);
  const PreparedDataset data =
      prepare_dataset(load_corpora(doc), cfg.pipeline);
  std::string id = doc.value("utterance", std::string());
  if (id.empty()) {
    if (data.utterances.empty()) throw ConfigError("no utterances to plot");
    id = data.utterances.front().id;
  }
  const PreparedUtterance& u = data.by_id(id);
  const Matrix z = zscore_fit_apply(u.acoustic, *model.input_stats).first;
  const ForwardResult fr = model_forward(model, z);
  const Matrix raw_mm = zscore_inverse(fr.raw, *model.target_stats);
  const Matrix smooth_mm = zscore_inverse(fr.smoothed, *model.target_stats);
  const Matrix target_mm = zscore_inverse(
      finalize_targets({u.target_mm, 100.0}, *model.target_stats, cfg.pipeline)
          .frames,
      *model.target_stats);
  fs::create_directories(out / "plots");
  std::vector<std::string> names;
  for (int c = 0; c < kArticulatoryChannels; ++c) {
    names.push_back(kArticulatoryChannelNames[c]);
  }
  for (int c = 0; c < kArticulatoryChannels; ++c) {
    const Vector t = target_mm.col(c);
    const Vector r = raw_mm.col(c);
    const Vector s = smooth_mm.col(c);
    write_channel_svg(out / "plots" / (id + "." + names[c] + ".svg"),
                      id + " " + names[c],
                      {{"target", "#000000", &t},
                       {"raw", "#d08000", &r},
                       {"smoothed", "#1060c0", &s}});
  }
  write_combined_svg(out / "plots" / (id + ".all.svg"), id, names, target_mm,
                     raw_mm, smooth_mm);
  std::cout << "wrote " << (kArticulatoryChannels + 1) << " plots for " << id
            << "\n";
}

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--set", args.overrides,
                  "Override a config key (dotted path, repeatable)");
  cmd->add_option("--out", args.out_dir, "Output directory")->required();
  cmd->add_option("--seed", args.seed, "Override the experiment seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic-to-articulatory inversion toolkit"};
  app.require_subcommand(1);
  CommonArgs args;
  CLI::App* c_synth = app.add_subcommand("synth", "Generate synthetic corpora");
  CLI::App* c_features =
      app.add_subcommand("features", "Extract acoustic features and targets");
  CLI::App* c_train = app.add_subcommand("train", "Train an inversion model");
  CLI::App* c_eval = app.add_subcommand("eval", "Evaluate a trained model");
  CLI::App* c_predict =
      app.add_subcommand("predict", "Write predicted trajectories");
  CLI::App* c_plot =
      app.add_subcommand("export-plot", "Export trajectory plots as SVG");
  for (CLI::App* cmd :
       {c_synth, c_features, c_train, c_eval, c_predict, c_plot}) {
    add_common(cmd, args);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const fs::path out(args.out_dir);
  try {
    json doc = json::object();
    if (!args.config_path.empty()) {
      try {
        doc = json::parse(read_text_file(args.config_path));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
      }
      if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    }
    for (const std::string& assignment : args.overrides) {
      apply_override(doc, assignment);
    }
    if (args.seed_given) doc["seed"] = args.seed;

    fs::create_directories(out);
    fs::remove(out / "FAILED");
    write_text_file(out / "config.resolved.json", doc.dump(2) + "\n");

    if (app.got_subcommand(c_synth)) {
      run_synth(doc, out);
    } else if (app.got_subcommand(c_features)) {
      run_features(doc, out);
    } else if (app.got_subcommand(c_train)) {
      run_train(doc, out);
    } else if (app.got_subcommand(c_eval)) {
      run_eval(doc, out);
    } else if (app.got_subcommand(c_predict)) {
      run_predict(doc, out);
    } else {
      run_export_plot(doc, out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << error_category_name(e.category()) << ": "
              << e.what() << "\n";
    std::error_code ec;
    if (fs::exists(out, ec)) {
      try {
        write_text_file(out / "FAILED",
                        std::string(error_category_name(e.category())) + ": " +
                            e.what() + "\n");
      } catch (...) {
      }
    }
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
