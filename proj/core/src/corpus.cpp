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

#include "aai/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "aai/io.hpp"

namespace aai {
namespace {

using nlohmann::json;

// Midsagittal rest positions (mm): UL, LL, LI, TT, TB, TD as (x, y).
constexpr double kBasePose[kEmaChannels] = {0.0, 12.0,  2.0, -12.0,
                                            8.0, -20.0, 30.0, -5.0,
                                            45.0, 0.0,  58.0, 4.0};
// Peak excursion per channel (mm); lips move less than the tongue.
constexpr double kMotionScale[kEmaChannels] = {1.5, 2.0, 1.5, 2.0, 1.0, 1.0,
                                               4.0, 3.0, 4.0, 3.0, 3.5, 2.5};
// Speaker-offset range per channel (mm); kept small for the lips so the
// literal lip-aperture radicand stays positive.
constexpr double kOffsetScale[kEmaChannels] = {1.5, 1.5, 1.5, 1.5, 2.0, 2.0,
                                               3.0, 3.0, 3.0, 3.0, 3.0, 3.0};

constexpr int kEnvelopeAnchors = 13;
constexpr double kAudioRate = 16000.0;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

struct Sinusoid {
  double freq, amp, phase;
};

struct ForwardMap {
  Matrix weights;  // 13 x 12
  Vector bias;     // 13
  Vector anchors_hz;
};

ForwardMap make_forward_map(std::uint64_t map_seed) {
  ForwardMap map;
  Rng rng(map_seed);
  Matrix w0(kEnvelopeAnchors, kEmaChannels);
  for (long n = 0; n < w0.size(); ++n) w0.data()[n] = rng.normal();
  // Orthonormal columns keep every articulatory direction equally visible
  // in the spectral envelope, so the inverse problem is well conditioned.
  const Eigen::HouseholderQR<Matrix> qr(w0);
  map.weights = 1.3 * (qr.householderQ() *
                       Matrix::Identity(kEnvelopeAnchors, kEmaChannels));
  map.bias.resize(kEnvelopeAnchors);
  for (int j = 0; j < kEnvelopeAnchors; ++j) {
    map.bias[j] = rng.uniform(-0.3, 0.3);
  }
  map.anchors_hz.resize(kEnvelopeAnchors);
  const double lo = hz_to_mel(300.0);
  const double hi = hz_to_mel(7000.0);
  for (int j = 0; j < kEnvelopeAnchors; ++j) {
    map.anchors_hz[j] =
        mel_to_hz(lo + (hi - lo) * j / (kEnvelopeAnchors - 1.0));
  }
  return map;
}

struct SpeakerDraw {
  Vector offset;   // 12, mm
  Matrix map_delta;  // 13 x 12
  double f0;
};

SpeakerDraw draw_speaker(const SyntheticSpec& spec, int speaker_index) {
  SpeakerDraw s;
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(speaker_index), 1));
  s.offset.resize(kEmaChannels);
  for (int c = 0; c < kEmaChannels; ++c) {
    s.offset[c] = rng.uniform(-1.0, 1.0) * kOffsetScale[c];
  }
  s.map_delta.resize(kEnvelopeAnchors, kEmaChannels);
  const double scale = 0.20 / std::sqrt(static_cast<double>(kEmaChannels));
  for (long n = 0; n < s.map_delta.size(); ++n) {
    s.map_delta.data()[n] = rng.normal() * scale;
  }
  s.f0 = rng.uniform(95.0, 140.0);
  return s;
}

struct Trajectory {
  std::vector<std::vector<Sinusoid>> parts;  // per channel
  Vector offset;                             // pose + speaker + corpus, mm

  double value(int channel, double t) const {
    double v = offset[channel];
    for (const Sinusoid& s : parts[static_cast<std::size_t>(channel)]) {
      v += s.amp * std::sin(2.0 * kPi * s.freq * t + s.phase);
    }
    return v;
  }
};

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n_speakers < 1 || spec.utterances_per_speaker < 1) {
    throw ConfigError("speaker/utterance counts must be positive");
  }
  if (!(spec.min_duration_s > 0.0 &&
        spec.min_duration_s <= spec.max_duration_s)) {
    throw ConfigError("bad duration range");
  }
  if (!(spec.band_limit_hz > 0.0 && spec.band_limit_hz < 25.0)) {
    throw ConfigError(
        "articulatory band limit must lie below the 25 Hz smoothing cutoff");
  }
  if (spec.max_sinusoids < 1) throw ConfigError("max_sinusoids must be >= 1");
  if (spec.noise_level < 0.0) throw ConfigError("negative noise level");
  if (spec.ema_sample_rate < 4.0 * spec.band_limit_hz) {
    throw ConfigError("ema_sample_rate too low for the band limit");
  }
  if (!spec.articulatory_offset_mm.empty() &&
      spec.articulatory_offset_mm.size() !=
          static_cast<std::size_t>(kEmaChannels)) {
    throw ConfigError("articulatory_offset_mm needs 12 entries");
  }
  if (spec.corpus_name.empty()) throw ConfigError("empty corpus name");
}

// Lip-aperture radicand and tongue radii must stay healthy for the whole
// utterance; a violating draw is rejected and redrawn deterministically.
bool trajectory_is_valid(const Trajectory& traj, double duration) {
  for (double t = 0.0; t <= duration; t += 0.005) {
    const double ul_x = traj.value(0, t), ul_y = traj.value(1, t);
    const double ll_x = traj.value(2, t), ll_y = traj.value(3, t);
    if ((ul_x * ul_x - ll_x * ll_x) + (ul_y * ul_y + ll_y * ll_y) < 4.0) {
      return false;
    }
    if (std::hypot(traj.value(6, t), traj.value(7, t)) < 5.0) return false;
    if (std::hypot(traj.value(8, t), traj.value(9, t)) < 5.0) return false;
  }
  return true;
}

Trajectory draw_trajectory(const SyntheticSpec& spec,
                           const SpeakerDraw& speaker, int speaker_index,
                           int utterance_index, double duration) {
  Vector corpus_offset = Vector::Zero(kEmaChannels);
  if (!spec.articulatory_offset_mm.empty()) {
    corpus_offset = Eigen::Map<const Vector>(
        spec.articulatory_offset_mm.data(), kEmaChannels);
  }
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(spec.seed,
                        static_cast<std::uint64_t>(speaker_index),
                        1000 + static_cast<std::uint64_t>(utterance_index) +
                            attempt * 1000003ULL));
    Trajectory traj;
    traj.offset.resize(kEmaChannels);
    traj.parts.resize(kEmaChannels);
    for (int c = 0; c < kEmaChannels; ++c) {
      traj.offset[c] = kBasePose[c] + speaker.offset[c] + corpus_offset[c];
      const int n_sin =
          1 + static_cast<int>(rng.integer(
                  static_cast<std::uint64_t>(spec.max_sinusoids)));
      const double amp_norm = std::sqrt(static_cast<double>(n_sin));
      for (int j = 0; j < n_sin; ++j) {
        Sinusoid s;
        s.freq = rng.uniform(0.25, spec.band_limit_hz);
        s.amp = kMotionScale[c] * rng.uniform(0.25, 1.0) / amp_norm;
        s.phase = rng.uniform(0.0, 2.0 * kPi);
        traj.parts[static_cast<std::size_t>(c)].push_back(s);
      }
    }
    if (trajectory_is_valid(traj, duration)) return traj;
  }
}

std::vector<double> synthesize_audio(const SyntheticSpec& spec,
                                     const ForwardMap& map,
                                     const SpeakerDraw& speaker,
                                     const Trajectory& traj, double duration,
                                     Rng& noise_rng) {
  const int n_samples = static_cast<int>(std::lround(duration * kAudioRate));
  const int n_knots = static_cast<int>(std::lround(duration * 100.0));
  const Matrix map_w = map.weights + speaker.map_delta;

  // Log spectral envelope at the anchor frequencies, one knot per 10 ms.
  Matrix log_gain(kEnvelopeAnchors, n_knots);
  Vector state(kEmaChannels);
  for (int k = 0; k < n_knots; ++k) {
    const double t = k / 100.0;
    for (int c = 0; c < kEmaChannels; ++c) {
      state[c] =
          (traj.value(c, t) - kBasePose[c]) / (kMotionScale[c] + 3.0);
    }
    log_gain.col(k) =
        3.0 * ((map_w * state + map.bias).array().tanh()).matrix();
  }

  struct Harmonic {
    double freq, phase, anchor_w;
    int anchor_lo;
  };
  std::vector<Harmonic> harmonics;
  for (int h = 1; h * speaker.f0 < 7600.0; ++h) {
    Harmonic hm;
    hm.freq = h * speaker.f0;
    hm.phase = noise_rng.uniform(0.0, 2.0 * kPi);
    int j = 0;
    while (j + 2 < kEnvelopeAnchors && map.anchors_hz[j + 1] < hm.freq) ++j;
    hm.anchor_lo = j;
    const double lo = map.anchors_hz[j], hi = map.anchors_hz[j + 1];
    hm.anchor_w = std::clamp((hm.freq - lo) / (hi - lo), 0.0, 1.0);
    harmonics.push_back(hm);
  }

  std::vector<double> mix(static_cast<std::size_t>(n_samples), 0.0);
  std::vector<double> env(static_cast<std::size_t>(n_knots));
  for (const Harmonic& hm : harmonics) {
    const double tilt = 1.0 / std::sqrt(1.0 + (hm.freq / 3000.0) *
                                                  (hm.freq / 3000.0));
    for (int k = 0; k < n_knots; ++k) {
      const double lg = (1.0 - hm.anchor_w) * log_gain(hm.anchor_lo, k) +
                        hm.anchor_w * log_gain(hm.anchor_lo + 1, k);
      env[static_cast<std::size_t>(k)] = std::exp(lg) * tilt;
    }
    const double omega = 2.0 * kPi * hm.freq / kAudioRate;
    for (int n = 0; n < n_samples; ++n) {
      const double t_knot = n * (100.0 / kAudioRate);
      int k = std::min(static_cast<int>(t_knot), n_knots - 2);
      if (k < 0) k = 0;
      const double frac = std::clamp(t_knot - k, 0.0, 1.0);
      const double a = (1.0 - frac) * env[static_cast<std::size_t>(k)] +
                       frac * env[static_cast<std::size_t>(k + 1)];
      mix[static_cast<std::size_t>(n)] +=
          a * std::sin(omega * n + hm.phase);
    }
  }
  double sq = 0.0;
  for (double v : mix) sq += v * v;
  const double rms = std::sqrt(sq / static_cast<double>(n_samples));
  for (double& v : mix) v += spec.noise_level * rms * noise_rng.normal();
  double peak = 0.0;
  for (double v : mix) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : mix) v *= 0.85 / peak;
  }
  return mix;
}

std::string speaker_name(const SyntheticSpec& spec, int k) {
  return spec.corpus_name + "_spk" + std::to_string(k);
}

}  // namespace

void save_manifest(const std::filesystem::path& path,
                   const CorpusManifest& manifest) {
  json doc;
  doc["corpus"] = manifest.corpus;
  doc["speakers"] = json::array();
  for (const SpeakerInfo& s : manifest.speakers) {
    doc["speakers"].push_back({{"id", s.id},
                               {"dialect", s.dialect},
                               {"ema_sample_rate", s.ema_sample_rate}});
  }
  doc["utterances"] = json::array();
  for (const UtteranceInfo& u : manifest.utterances) {
    doc["utterances"].push_back({{"id", u.id},
                                 {"speaker", u.speaker},
                                 {"audio", u.audio},
                                 {"ema", u.ema},
                                 {"duration_s", u.duration_s}});
  }
  write_text_file(path, doc.dump(2) + "\n");
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw SchemaError("bad manifest " + path.string() + ": " + e.what());
  }
  CorpusManifest manifest;
  manifest.root = path.parent_path();
  try {
    manifest.corpus = doc.at("corpus").get<std::string>();
    for (const json& s : doc.at("speakers")) {
      SpeakerInfo info;
      info.id = s.at("id").get<std::string>();
      info.dialect = s.value("dialect", std::string());
      info.ema_sample_rate = s.at("ema_sample_rate").get<double>();
      manifest.speakers.push_back(std::move(info));
    }
    for (const json& u : doc.at("utterances")) {
      UtteranceInfo info;
      info.id = u.at("id").get<std::string>();
      info.speaker = u.at("speaker").get<std::string>();
      info.audio = u.at("audio").get<std::string>();
      info.ema = u.at("ema").get<std::string>();
      info.duration_s = u.at("duration_s").get<double>();
      manifest.utterances.push_back(std::move(info));
    }
  } catch (const json::exception& e) {
    throw SchemaError("bad manifest " + path.string() + ": " + e.what());
  }
  std::set<std::string> ids;
  for (const UtteranceInfo& u : manifest.utterances) {
    if (!ids.insert(u.id).second) {
      throw SchemaError("duplicate utterance id " + u.id);
    }
    if (!(u.duration_s > 0.0)) {
      throw SchemaError("non-positive duration for " + u.id);
    }
  }
  return manifest;
}

Corpus load_corpus(const std::filesystem::path& manifest_path) {
  Corpus corpus;
  corpus.manifest = load_manifest(manifest_path);
  std::set<std::string> speaker_ids;
  for (const SpeakerInfo& s : corpus.manifest.speakers) {
    speaker_ids.insert(s.id);
  }
  for (const UtteranceInfo& info : corpus.manifest.utterances) {
    if (!speaker_ids.count(info.speaker)) {
      throw SchemaError("utterance " + info.id + " names unknown speaker " +
                        info.speaker);
    }
    LoadedUtterance u;
    u.info = info;
    const auto audio_path = corpus.manifest.root / info.audio;
    const auto ema_path = corpus.manifest.root / info.ema;
    if (!std::filesystem::exists(audio_path)) {
      throw LoadError("utterance " + info.id + ": missing audio file " +
                      audio_path.string());
    }
    if (!std::filesystem::exists(ema_path)) {
      throw LoadError("utterance " + info.id + ": missing ema file " +
                      ema_path.string());
    }
    WavData wav = read_wav(audio_path);
    u.audio.samples = std::move(wav.samples);
    u.audio.sample_rate = wav.sample_rate;
    u.ema.channels = read_ema_csv(ema_path);
    for (const SpeakerInfo& s : corpus.manifest.speakers) {
      if (s.id == info.speaker) u.ema.sample_rate = s.ema_sample_rate;
    }
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

std::filesystem::path generate_synthetic_corpus(
    const SyntheticSpec& spec, const std::filesystem::path& dir) {
  validate_spec(spec);
  std::filesystem::create_directories(dir / "audio");
  std::filesystem::create_directories(dir / "ema");
  const ForwardMap map = make_forward_map(spec.map_seed);
  CorpusManifest manifest;
  manifest.corpus = spec.corpus_name;
  manifest.root = dir;
  for (int k = 0; k < spec.n_speakers; ++k) {
    const SpeakerDraw speaker = draw_speaker(spec, k);
    manifest.speakers.push_back(
        {speaker_name(spec, k), spec.corpus_name, spec.ema_sample_rate});
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      Rng urng(derive_seed(spec.seed, static_cast<std::uint64_t>(k),
                           500000 + static_cast<std::uint64_t>(u)));
      const double duration =
          std::round(urng.uniform(spec.min_duration_s, spec.max_duration_s) *
                     100.0) /
          100.0;
      const Trajectory traj = draw_trajectory(spec, speaker, k, u, duration);
      const int n_ema =
          static_cast<int>(std::lround(duration * spec.ema_sample_rate));
      Matrix ema(n_ema, kEmaChannels);
      for (int r = 0; r < n_ema; ++r) {
        const double t = r / spec.ema_sample_rate;
        for (int c = 0; c < kEmaChannels; ++c) ema(r, c) = traj.value(c, t);
      }
      const std::vector<double> audio =
          synthesize_audio(spec, map, speaker, traj, duration, urng);
      UtteranceInfo info;
      info.id = speaker_name(spec, k) + "_utt" + std::to_string(u);
      info.speaker = speaker_name(spec, k);
      info.audio = "audio/" + info.id + ".wav";
      info.ema = "ema/" + info.id + ".csv";
      info.duration_s = duration;
      write_wav(dir / info.audio, audio, static_cast<int>(kAudioRate));
      write_ema_csv(dir / info.ema, ema);
      manifest.utterances.push_back(std::move(info));
    }
  }
  const auto manifest_path = dir / "manifest.json";
  save_manifest(manifest_path, manifest);
  return manifest_path;
}

std::pair<std::filesystem::path, std::filesystem::path> two_corpus_synthesis(
    const SyntheticSpec& spec_a, const SyntheticSpec& spec_b,
    const std::filesystem::path& dir_a, const std::filesystem::path& dir_b) {
  return {generate_synthetic_corpus(spec_a, dir_a),
          generate_synthetic_corpus(spec_b, dir_b)};
}

}  // namespace aai
