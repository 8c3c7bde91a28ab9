// Copyright 2026 The mayek-tts Authors
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

// Command-line front end. Exit codes: 0 success, 1 data/validation error
// (details on stderr), 2 usage error. Stdout carries data, stderr carries
// diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mayektts/mayektts.hpp"

namespace {

using namespace mayektts;

struct Tables {
  ClassificationTable classes;
  NormRules rules;
  MappingTable mapping;
};

Tables load_tables(const Config& cfg) {
  return Tables{ClassificationTable::load(cfg.path("classes_table")),
                NormRules::load(cfg.path("norm_rules")),
                MappingTable::load(cfg.path("g2p_table"))};
}

StftConfig stft_config(const Config& cfg) {
  StftConfig s;
  s.n_fft = cfg.u64("n_fft", s.n_fft);
  s.hop = cfg.u64("hop", s.hop);
  s.win_length = cfg.u64("win_length", s.win_length);
  return s;
}

MelConfig mel_config(const Config& cfg) {
  MelConfig m;
  m.n_mels = cfg.u64("n_mels", m.n_mels);
  m.fmin = cfg.f64("fmin", m.fmin);
  m.fmax = cfg.f64("fmax", m.fmax);
  m.sample_rate = static_cast<uint32_t>(cfg.u64("sample_rate", m.sample_rate));
  return m;
}

TrimConfig trim_config(const Config& cfg) {
  TrimConfig t;
  t.threshold_db = cfg.f64("trim_threshold_db", t.threshold_db);
  t.frame_ms = static_cast<uint32_t>(cfg.u64("trim_frame_ms", t.frame_ms));
  t.hop_ms = static_cast<uint32_t>(cfg.u64("trim_hop_ms", t.hop_ms));
  t.keep_pad_ms = static_cast<uint32_t>(cfg.u64("trim_pad_ms", t.keep_pad_ms));
  return t;
}

std::string join_phones(const PhonemeSeq& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.phones.size(); ++i) {
    if (i != 0) out += ' ';
    out += seq.phones[i];
  }
  return out;
}

int report_issues(const ValidationReport& report) {
  for (const auto& issue : report.issues) {
    std::cerr << issue_kind_name(issue.kind) << " at " << issue.offset << ": " << issue.message
              << "\n";
  }
  return report.ok() ? 0 : 1;
}

int cmd_validate(const Config& cfg, const std::string& text) {
  const Tables t = load_tables(cfg);
  const ValidationReport report = validate_script(text, t.classes);
  if (report.ok()) std::cout << "ok\n";
  return report_issues(report);
}

int cmd_normalize(const Config& cfg, const std::string& text) {
  const Tables t = load_tables(cfg);
  std::cout << normalize_text(text, t.rules).text << "\n";
  return 0;
}

int cmd_g2p(const Config& cfg, const std::string& text) {
  const Tables t = load_tables(cfg);
  const NormalizedText norm = normalize_text(text, t.rules);
  const PhonemeSeq seq = to_phonemes(norm.text, t.mapping, t.classes);
  std::cout << join_phones(seq) << "\n";
  return 0;
}

int cmd_audio_prep(const Config& cfg, const std::string& in, const std::string& out) {
  const AudioBuffer raw = read_wav(in);
  const TrimResult trimmed = trim_silence(raw, trim_config(cfg));
  if (trimmed.all_silent) {
    std::cerr << "input is below the silence threshold: " << in << "\n";
    return 1;
  }
  const LoudnessResult leveled =
      normalize_loudness(trimmed.audio, cfg.f64("target_dbfs", -23.0));
  const uint32_t target_rate = static_cast<uint32_t>(cfg.u64("sample_rate", 22050));
  write_wav(out, resample(leveled.audio, target_rate));
  return 0;
}

int cmd_featurize(const Config& cfg, const std::string& wav_path, const std::string& out) {
  const MelConfig mel_cfg = mel_config(cfg);
  AudioBuffer buf = read_wav(wav_path);
  if (buf.sample_rate != mel_cfg.sample_rate) buf = resample(buf, mel_cfg.sample_rate);
  save_mels(out, mel_spectrogram(buf, stft_config(cfg), mel_cfg));
  return 0;
}

int cmd_build_corpus(const Config& cfg, const std::string& list, const std::string& wav_dir,
                     const std::string& out) {
  namespace fs = std::filesystem;
  const Tables t = load_tables(cfg);
  auto [manifest, report] = build_manifest(list, wav_dir, t.rules, t.classes, t.mapping);

  // Stored wav paths are relative to the manifest file, not to wav_dir.
  const fs::path out_dir = fs::absolute(fs::path(out)).parent_path();
  const fs::path wav_abs = fs::absolute(fs::path(wav_dir));
  const fs::path rel = wav_abs.lexically_relative(out_dir);
  for (auto& e : manifest.entries) {
    const fs::path base = rel.empty() ? wav_abs : rel;
    e.wav_path = (base / e.wav_path).lexically_normal().generic_string();
  }
  manifest.base_dir = out_dir.string();
  write_manifest(out, manifest);
  std::cout << "entries=" << manifest.entries.size() << "\n";
  return report_issues(report);
}

int cmd_split(const Config& cfg, const std::string& manifest_path) {
  const Manifest manifest = read_manifest(manifest_path);
  SplitSpec spec;
  spec.seed = cfg.u64("split_seed", 0);
  const CorpusSplit split = split_corpus(manifest, spec);
  const std::filesystem::path dir = std::filesystem::path(manifest_path).parent_path();
  auto write_part = [&](const char* name, const std::vector<ManifestEntry>& entries) {
    Manifest part;
    part.base_dir = manifest.base_dir;
    part.entries = entries;
    write_manifest((dir / (std::string(name) + ".psv")).string(), part);
    std::cout << name << "=" << entries.size() << "\n";
  };
  write_part("train", split.train);
  write_part("val", split.val);
  write_part("test", split.test);
  return 0;
}

int cmd_stats(const std::string& manifest_path) {
  const Manifest manifest = read_manifest(manifest_path);
  std::cout << format_stats(compute_stats(manifest));
  return 0;
}

int cmd_synth(const Config& cfg, const std::string& text, const std::string& out,
              const std::string& weights_path) {
  const Tables t = load_tables(cfg);
  const NormalizedText norm = normalize_text(text, t.rules);
  const PhonemeSeq seq = to_phonemes(norm.text, t.mapping, t.classes);
  const std::vector<int> ids = phonemes_to_ids(seq, t.mapping, true);

  nn::Dims dims;
  dims.vocab = t.mapping.inventory.size();
  const nn::Tacotron2Params params =
      weights_path.empty() ? nn::init_params(dims, cfg.u64("model_seed", 42))
                           : nn::load_weights(weights_path, dims);
  Rng prenet_rng(cfg.u64("prenet_seed", 7));
  const nn::ForwardResult fwd =
      nn::tacotron_forward(params, ids, cfg.u64("max_frames", 120), prenet_rng);

  MelSpec mel;
  mel.n_frames = fwd.mel_post.dim(0);
  mel.n_mels = fwd.mel_post.dim(1);
  mel.data = fwd.mel_post.vec();
  const MelConfig mel_cfg = mel_config(cfg);
  const StftConfig stft_cfg = stft_config(cfg);
  const Tensor linear_mag = mel_to_linear(mel, mel_cfg, stft_cfg.n_fft);
  GriffinLimResult gl = griffin_lim(linear_mag, stft_cfg, cfg.u64("gl_iters", 60),
                                    cfg.u64("gl_seed", 1234), mel_cfg.sample_rate);

  double peak = 0.0;
  for (const double s : gl.audio.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    for (double& s : gl.audio.samples) s *= 0.95 / peak;
  }
  write_wav(out, gl.audio);
  std::cout << "frames=" << mel.n_frames << " samples=" << gl.audio.samples.size() << "\n";
  return 0;
}

int cmd_gradcheck() {
  Rng rng(99);
  auto fill = [&](Tensor& t, double scale) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-scale, scale);
  };

  std::vector<nn::GradCheckEntry> entries;

  {
    Tensor x({7}), w({5, 7}), b({5}), gy({5});
    fill(x, 1.0); fill(w, 1.0); fill(b, 1.0); fill(gy, 1.0);
    auto loss = [&]() {
      const Tensor y = nn::linear(x, w, b);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += gy[i] * y[i];
      return acc;
    };
    const nn::LinearGrads g = nn::linear_backward(x, w, gy);
    entries.push_back(nn::check_gradient("linear.w", w, loss, g.dw));
    entries.push_back(nn::check_gradient("linear.x", x, loss, g.dx));
  }
  {
    Tensor x({3, 9}), w({4, 3, 5}), gy({4, 9});
    fill(x, 1.0); fill(w, 1.0); fill(gy, 1.0);
    auto loss = [&]() {
      const Tensor y = nn::conv1d(x, w);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += gy[i] * y[i];
      return acc;
    };
    const nn::Conv1dGrads g = nn::conv1d_backward(x, w, gy);
    entries.push_back(nn::check_gradient("conv1d.w", w, loss, g.dw));
    entries.push_back(nn::check_gradient("conv1d.x", x, loss, g.dx));
  }
  {
    const std::size_t in = 6, hidden = 5;
    nn::LstmParams p;
    for (Tensor* t : {&p.w_f, &p.w_i, &p.w_o, &p.w_c}) { *t = Tensor({hidden, in}); fill(*t, 0.5); }
    for (Tensor* t : {&p.u_f, &p.u_i, &p.u_o, &p.u_c}) { *t = Tensor({hidden, hidden}); fill(*t, 0.5); }
    for (Tensor* t : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) { *t = Tensor({hidden}); fill(*t, 0.5); }
    Tensor x({in});
    nn::LstmState prev = nn::zero_state(hidden);
    fill(x, 1.0); fill(prev.h, 1.0); fill(prev.c, 1.0);
    Tensor dh({hidden}), dc({hidden});
    fill(dh, 1.0); fill(dc, 1.0);
    auto loss = [&]() {
      const nn::LstmState next = nn::lstm_cell(x, prev, p);
      double acc = 0.0;
      for (std::size_t i = 0; i < hidden; ++i) acc += dh[i] * next.h[i] + dc[i] * next.c[i];
      return acc;
    };
    const nn::LstmGrads g = nn::lstm_cell_backward(x, prev, p, dh, dc);
    entries.push_back(nn::check_gradient("lstm.w_c", p.w_c, loss, g.dp.w_c));
    entries.push_back(nn::check_gradient("lstm.u_o", p.u_o, loss, g.dp.u_o));
    entries.push_back(nn::check_gradient("lstm.x", x, loss, g.dx));
  }
  {
    const std::size_t L = 6, mem = 4, attn = 5, q = 3, filters = 2;
    nn::AttentionParams p;
    p.query_w = Tensor({attn, q});
    p.memory_w = Tensor({attn, mem});
    p.location_w = Tensor({attn, filters});
    p.filters = Tensor({filters, 1, 3});
    p.v = Tensor({attn});
    p.b = Tensor({attn});
    for (Tensor* t : {&p.query_w, &p.memory_w, &p.location_w, &p.filters, &p.v, &p.b}) fill(*t, 0.7);
    Tensor query({q}), memory({L, mem}), prev_align({L});
    fill(query, 1.0); fill(memory, 1.0);
    double total = 0.0;
    for (std::size_t i = 0; i < L; ++i) { prev_align[i] = rng.uniform(); total += prev_align[i]; }
    for (std::size_t i = 0; i < L; ++i) prev_align[i] /= total;
    Tensor dctx({mem}), dalign({L});
    fill(dctx, 1.0); fill(dalign, 1.0);
    auto loss = [&]() {
      const Tensor processed = nn::process_memory(memory, p);
      const nn::AttentionResult r = nn::attention_step(query, memory, processed, prev_align, p);
      double acc = 0.0;
      for (std::size_t i = 0; i < mem; ++i) acc += dctx[i] * r.context[i];
      for (std::size_t i = 0; i < L; ++i) acc += dalign[i] * r.alignment[i];
      return acc;
    };
    const Tensor processed = nn::process_memory(memory, p);
    const nn::AttentionGrads g =
        nn::attention_step_backward(query, memory, processed, prev_align, p, dctx, dalign);
    entries.push_back(nn::check_gradient("attention.query_w", p.query_w, loss, g.dp.query_w));
    entries.push_back(nn::check_gradient("attention.filters", p.filters, loss, g.dp.filters));
    entries.push_back(nn::check_gradient("attention.v", p.v, loss, g.dp.v));
    entries.push_back(nn::check_gradient("attention.query", query, loss, g.dquery));
  }

  bool ok = true;
  for (const auto& e : entries) {
    std::printf("%-20s rel_err=%.3e\n", e.name.c_str(), e.rel_error);
    ok = ok && e.rel_error < 1e-5;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meetei Mayek text-to-speech toolchain"};
  app.require_subcommand(1);

  std::string config_path = "data/default.cfg";
  app.add_option("--config", config_path, "Configuration file")->capture_default_str();

  std::string text, in_path, out_path, weights_path;

  auto* validate = app.add_subcommand("validate", "Check that text is well-formed Meetei Mayek");
  validate->add_option("text", text)->required();

  auto* normalize = app.add_subcommand("normalize", "Print normalized text");
  normalize->add_option("text", text)->required();

  auto* g2p = app.add_subcommand("g2p", "Print the phoneme sequence for text");
  g2p->add_option("text", text)->required();

  auto* audio_prep = app.add_subcommand("audio-prep", "Trim, level, and resample a WAV file");
  audio_prep->add_option("input", in_path)->required();
  audio_prep->add_option("output", out_path)->required();

  auto* featurize = app.add_subcommand("featurize", "Write the log-mel spectrogram of a WAV file");
  featurize->add_option("input", in_path)->required();
  featurize->add_option("output", out_path)->required();

  auto* build = app.add_subcommand("build-corpus", "Pair a text list with WAV files");
  std::string wav_dir;
  build->add_option("list", in_path)->required();
  build->add_option("wavdir", wav_dir)->required();
  build->add_option("output", out_path)->required();

  auto* split = app.add_subcommand("split", "Write train/val/test manifests");
  split->add_option("manifest", in_path)->required();

  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  stats->add_option("manifest", in_path)->required();

  auto* synth = app.add_subcommand("synth", "Synthesize speech audio for text");
  synth->add_option("text", text)->required();
  synth->add_option("output", out_path)->required();
  synth->add_option("--weights", weights_path, "MTTW weight file");

  auto* gradcheck = app.add_subcommand("gradcheck", "Verify analytic gradients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    const mayektts::Config cfg = mayektts::Config::load(config_path);
    if (validate->parsed()) return cmd_validate(cfg, text);
    if (normalize->parsed()) return cmd_normalize(cfg, text);
    if (g2p->parsed()) return cmd_g2p(cfg, text);
    if (audio_prep->parsed()) return cmd_audio_prep(cfg, in_path, out_path);
    if (featurize->parsed()) return cmd_featurize(cfg, in_path, out_path);
    if (build->parsed()) return cmd_build_corpus(cfg, in_path, wav_dir, out_path);
    if (split->parsed()) return cmd_split(cfg, in_path);
    if (stats->parsed()) return cmd_stats(in_path);
    if (synth->parsed()) return cmd_synth(cfg, text, out_path, weights_path);
    if (gradcheck->parsed()) return cmd_gradcheck();
  } catch (const mayektts::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
