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

// Six-sentence fixture corpus shared by the corpus, CLI, and acceptance
// tests. Sample counts pin the golden durations exactly (22050 Hz).

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mayektts/audio.hpp"
#include "mayektts/textio.hpp"

namespace fixture {

struct Sentence {
  const char* id;
  const char* raw;
  std::size_t n_samples;
};

inline const std::vector<Sentence>& sentences() {
  static const std::vector<Sentence> all = {
      {"fx001", "ꯑꯩ ꯆꯥꯛ ꯆꯥꯢ꯫", 26460},
      {"fx002", "ꯏꯃꯥ ꯂꯥꯏꯁꯤ꯬꯫", 33075},
      {"fx003", "ꯃꯩꯇꯩ ꯃꯌꯦꯛ", 39690},
      {"fx004", "ꯁ꯭ꯀꯨꯜ ꯑꯃ", 19845},
      {"fx005", "ꯃꯤ ꯲ ꯂꯥꯛꯂꯦ", 46305},
      {"fx006", "ꯅꯨꯪ ꯌꯨꯝ ꯍꯥꯢ", 24255},
  };
  return all;
}

inline mayektts::AudioBuffer tone_audio(std::size_t n_samples, double freq_hz,
                                        uint32_t rate = 22050) {
  mayektts::AudioBuffer buf;
  buf.sample_rate = rate;
  buf.samples.resize(n_samples);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < n_samples; ++i) {
    buf.samples[i] = 0.3 * std::sin(2.0 * pi * freq_hz * static_cast<double>(i) / rate);
  }
  return buf;
}

struct CorpusPaths {
  std::string root;
  std::string list;
  std::string wav_dir;
  std::string manifest;  // suggested output location, not created here
};

// Writes list.txt and wavs/<id>.wav under `root`; returns the paths.
inline CorpusPaths make_corpus(const std::string& root) {
  namespace fs = std::filesystem;
  CorpusPaths paths;
  paths.root = root;
  paths.wav_dir = (fs::path(root) / "wavs").string();
  paths.list = (fs::path(root) / "list.txt").string();
  paths.manifest = (fs::path(root) / "manifest.psv").string();
  fs::create_directories(paths.wav_dir);
  std::string list;
  double freq = 220.0;
  for (const auto& s : sentences()) {
    list += s.id;
    list += '|';
    list += s.raw;
    list += '\n';
    const auto wav = (fs::path(paths.wav_dir) / (std::string(s.id) + ".wav")).string();
    mayektts::write_wav(wav, tone_audio(s.n_samples, freq));
    freq += 20.0;
  }
  mayektts::write_text_file(paths.list, list);
  return paths;
}

}  // namespace fixture
