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
// On-disk corpus format (WAV audio + CSV articulator trajectories + JSON
// manifest) and a synthetic parallel-corpus generator. The generator draws
// band-limited articulatory trajectories and renders audio from them
// through a seeded affine+tanh spectral-envelope map, so the inverse
// mapping the toolkit is supposed to learn actually exists.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "aai/common.hpp"
#include "aai/ema.hpp"
#include "aai/frontend.hpp"

namespace aai {

struct SpeakerInfo {
  std::string id;
  std::string dialect;
  double ema_sample_rate = 100.0;
};

struct UtteranceInfo {
  std::string id;
  std::string speaker;
  std::string audio;  // path relative to the manifest directory
  std::string ema;
  double duration_s = 0.0;
};

struct CorpusManifest {
  std::string corpus;
  std::vector<SpeakerInfo> speakers;
  std::vector<UtteranceInfo> utterances;
  std::filesystem::path root;  // directory containing the manifest
};

void save_manifest(const std::filesystem::path& path,
                   const CorpusManifest& manifest);
CorpusManifest load_manifest(const std::filesystem::path& path);

struct LoadedUtterance {
  UtteranceInfo info;
  Waveform audio;
  EmaRecording ema;
};

struct Corpus {
  CorpusManifest manifest;
  std::vector<LoadedUtterance> utterances;
};

Corpus load_corpus(const std::filesystem::path& manifest_path);

struct SyntheticSpec {
  std::string corpus_name = "synth";
  int n_speakers = 1;
  int utterances_per_speaker = 10;
  double min_duration_s = 1.8;
  double max_duration_s = 2.2;
  double band_limit_hz = 10.0;  // must stay below the 25 Hz smoothing cutoff
  int max_sinusoids = 6;
  std::uint64_t seed = 1;      // trajectories, speaker identities
  std::uint64_t map_seed = 7;  // articulatory-to-spectral forward map
  double noise_level = 0.005;  // additive white noise relative to signal rms
  double ema_sample_rate = 100.0;
  std::vector<double> articulatory_offset_mm;  // empty or 12 entries
};

// Writes audio/, ema/ and manifest.json under dir (manifest last) and
// returns the manifest path. Byte-deterministic for a fixed spec.
std::filesystem::path generate_synthetic_corpus(
    const SyntheticSpec& spec, const std::filesystem::path& dir);

// Generates the two corpora side by side. A domain gap between them is
// produced by giving spec_b its own map_seed and articulatory offset.
std::pair<std::filesystem::path, std::filesystem::path> two_corpus_synthesis(
    const SyntheticSpec& spec_a, const SyntheticSpec& spec_b,
    const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);

}  // namespace aai
