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

// Text-audio pairing: manifest construction and I/O, deterministic splits,
// corpus statistics, and validation checks.
//
// Manifest format: UTF-8, one record per line,
//   id|wav|raw|normalized|phonemes|duration
// with duration in seconds (%.3f) and wav paths relative to the manifest
// location.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mayektts/audio.hpp"
#include "mayektts/common.hpp"
#include "mayektts/g2p.hpp"
#include "mayektts/normalize.hpp"
#include "mayektts/rng.hpp"
#include "mayektts/script.hpp"
#include "mayektts/textio.hpp"
#include "mayektts/unicode.hpp"

namespace mayektts {

struct ManifestEntry {
  std::string id;
  std::string wav_path;  // relative to the manifest directory
  std::string raw;
  std::string normalized;
  std::string phonemes;  // space-joined symbols
  double duration_s = 0.0;
};

struct Manifest {
  std::string base_dir;  // directory wav paths are resolved against
  std::vector<ManifestEntry> entries;
};

struct CorpusStats {
  std::size_t n_samples = 0;
  double avg_chars_per_sentence = 0.0;
  std::size_t n_unique_chars = 0;
  double total_duration_min = 0.0;
  uint32_t sample_rate = 0;
};

struct SplitSpec {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  uint64_t seed = 0;

  void check() const {
    if (!(train > 0.0) || !(val > 0.0) || !(test > 0.0) ||
        std::abs(train + val + test - 1.0) > 1e-9) {
      throw Error(ErrorCode::BadConfig, "split: ratios must be positive and sum to 1");
    }
  }
};

struct DurationLimits {
  double min_s = 0.5;
  double max_s = 15.0;
};

namespace detail_corpus {

inline std::string join_path(const std::string& dir, const std::string& rel) {
  if (dir.empty()) return rel;
  const std::filesystem::path p(rel);
  if (p.is_absolute()) return rel;
  return (std::filesystem::path(dir) / p).string();
}

inline std::string format_duration(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", seconds);
  return buf;
}

// Non-space codepoints of a UTF-8 string.
inline std::vector<uint32_t> visible_codepoints(const std::string& text) {
  std::vector<uint32_t> cps;
  for (const auto& dc : decode_utf8(text)) {
    if (!is_space_cp(dc.cp)) cps.push_back(dc.cp);
  }
  return cps;
}

}  // namespace detail_corpus

inline std::string format_manifest_line(const ManifestEntry& e) {
  return e.id + "|" + e.wav_path + "|" + e.raw + "|" + e.normalized + "|" + e.phonemes + "|" +
         detail_corpus::format_duration(e.duration_s);
}

inline void write_manifest(const std::string& path, const Manifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    out += format_manifest_line(e);
    out += '\n';
  }
  write_text_file(path, out);
}

inline Manifest read_manifest(const std::string& path) {
  Manifest manifest;
  manifest.base_dir = std::filesystem::path(path).parent_path().string();
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cols = split_on(lines[i], '|');
    if (cols.size() != 6) {
      throw Error(ErrorCode::BadTableFile,
                  "manifest line " + std::to_string(i + 1) + ": expected 6 fields, found " +
                      std::to_string(cols.size()));
    }
    ManifestEntry e;
    e.id = std::string(cols[0]);
    e.wav_path = std::string(cols[1]);
    e.raw = std::string(cols[2]);
    e.normalized = std::string(cols[3]);
    e.phonemes = std::string(cols[4]);
    char* end = nullptr;
    const std::string dur(cols[5]);
    e.duration_s = std::strtod(dur.c_str(), &end);
    if (end == dur.c_str() || *end != '\0' || !(e.duration_s > 0.0)) {
      throw Error(ErrorCode::BadTableFile,
                  "manifest line " + std::to_string(i + 1) + ": bad duration " + dur);
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

// Pairs a text list (lines `id|raw_text`) with WAV files named `<id>.wav`
// under wav_dir. Each line is normalized, script-validated, phonemized, and
// probed for audio; lines failing any step are excluded and reported with
// their 1-based line number in Issue::offset. Duplicate ids abort the build.
inline std::pair<Manifest, ValidationReport> build_manifest(const std::string& text_file,
                                                            const std::string& wav_dir,
                                                            const NormRules& rules,
                                                            const ClassificationTable& classes,
                                                            const MappingTable& mapping) {
  std::string text;
  try {
    text = read_text_file(text_file);
  } catch (const Error&) {
    throw Error(ErrorCode::MissingTextFile, "cannot read text list: " + text_file);
  }

  Manifest manifest;
  manifest.base_dir = wav_dir;
  ValidationReport report;
  std::unordered_set<std::string> seen_ids;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string line(lines[i]);
    if (line.empty()) continue;

    const auto sep = line.find('|');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= line.size()) {
      report.add({line_no, 0, IssueKind::BadLine, "expected id|raw_text"});
      continue;
    }
    ManifestEntry e;
    e.id = line.substr(0, sep);
    e.raw = line.substr(sep + 1);
    if (e.raw.find('|') != std::string::npos) {
      report.add({line_no, 0, IssueKind::BadLine, "raw text contains '|': " + e.id});
      continue;
    }
    if (!seen_ids.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate id at line " + std::to_string(line_no) +
                                              ": " + e.id);
    }

    e.normalized = normalize_text(e.raw, rules).text;
    const ValidationReport script_report = validate_script(e.normalized, classes);
    if (!script_report.ok()) {
      report.add({line_no, script_report.issues.front().codepoint, IssueKind::Unmapped,
                  "script validation failed: " + e.id});
      continue;
    }
    try {
      const PhonemeSeq seq = to_phonemes(e.normalized, mapping, classes);
      std::string joined;
      for (std::size_t k = 0; k < seq.phones.size(); ++k) {
        if (k != 0) joined += ' ';
        joined += seq.phones[k];
      }
      e.phonemes = std::move(joined);
    } catch (const Error&) {
      report.add({line_no, 0, IssueKind::Unmapped, "phoneme mapping failed: " + e.id});
      continue;
    }
    if (e.phonemes.empty()) {
      report.add({line_no, 0, IssueKind::Unmapped, "no phonemes produced: " + e.id});
      continue;
    }

    e.wav_path = e.id + ".wav";
    const std::string full = detail_corpus::join_path(wav_dir, e.wav_path);
    try {
      const AudioBuffer buf = read_wav(full);
      e.duration_s = buf.duration_s();
    } catch (const Error& err) {
      const IssueKind kind =
          err.code() == ErrorCode::IoError ? IssueKind::MissingAudio : IssueKind::BadAudio;
      report.add({line_no, 0, kind, "audio probe failed: " + e.wav_path});
      continue;
    }
    if (!(e.duration_s > 0.0)) {
      report.add({line_no, 0, IssueKind::BadAudio, "empty audio: " + e.wav_path});
      continue;
    }
    manifest.entries.push_back(std::move(e));
  }
  return {std::move(manifest), std::move(report)};
}

struct CorpusSplit {
  std::vector<ManifestEntry> train, val, test;
};

// Deterministic 80/10/10 partition: entries are ordered by id (so the result
// does not depend on manifest file order), shuffled by a seeded
// Fisher-Yates, then cut at floor(0.8n) and floor(0.1n); the remainder is
// the test set.
inline CorpusSplit split_corpus(const Manifest& manifest, const SplitSpec& spec) {
  spec.check();
  const std::size_t n = manifest.entries.size();
  if (n < 3) throw Error(ErrorCode::TooFewSamples, "split: need at least 3 entries");
  std::vector<ManifestEntry> pool = manifest.entries;
  std::sort(pool.begin(), pool.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  Rng rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(pool[i], pool[j]);
  }
  const std::size_t n_train = static_cast<std::size_t>(static_cast<double>(n) * spec.train);
  const std::size_t n_val = static_cast<std::size_t>(static_cast<double>(n) * spec.val);
  CorpusSplit split;
  split.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train),
                   pool.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), pool.end());
  return split;
}

// Durations and rates come from the WAV headers, not the manifest column;
// all files must agree on the sample rate.
inline CorpusStats compute_stats(const Manifest& manifest) {
  CorpusStats stats;
  stats.n_samples = manifest.entries.size();
  if (stats.n_samples == 0) return stats;

  std::size_t total_chars = 0;
  std::set<uint32_t> unique;
  double total_seconds = 0.0;
  for (const auto& e : manifest.entries) {
    const auto cps = detail_corpus::visible_codepoints(e.raw);
    total_chars += cps.size();
    unique.insert(cps.begin(), cps.end());
    const AudioBuffer buf = read_wav(detail_corpus::join_path(manifest.base_dir, e.wav_path));
    if (stats.sample_rate == 0) {
      stats.sample_rate = buf.sample_rate;
    } else if (buf.sample_rate != stats.sample_rate) {
      throw Error(ErrorCode::MixedSampleRates, "sample rate differs for " + e.wav_path);
    }
    total_seconds += buf.duration_s();
  }
  stats.avg_chars_per_sentence =
      static_cast<double>(total_chars) / static_cast<double>(stats.n_samples);
  stats.n_unique_chars = unique.size();
  stats.total_duration_min = total_seconds / 60.0;
  return stats;
}

// Aligned table followed by a blank line and machine-readable key=value
// pairs; both carry the same five fields.
inline std::string format_stats(const CorpusStats& s) {
  char avg[32], dur[32];
  std::snprintf(avg, sizeof avg, "%.2f", s.avg_chars_per_sentence);
  std::snprintf(dur, sizeof dur, "%.2f", s.total_duration_min);
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"n_samples", std::to_string(s.n_samples)},
      {"avg_chars_per_sentence", avg},
      {"n_unique_chars", std::to_string(s.n_unique_chars)},
      {"total_duration_min", dur},
      {"sample_rate", std::to_string(s.sample_rate)},
  };
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::string out;
  for (const auto& [k, v] : rows) {
    out += k;
    out.append(width - k.size() + 2, ' ');
    out += v;
    out += '\n';
  }
  out += '\n';
  for (const auto& [k, v] : rows) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

// Automated review: duration outliers, entries whose normalized text no
// longer maps to phonemes, silent audio, and exact duplicate raw texts.
// Issue::offset is the 0-based entry index.
inline ValidationReport validate_corpus(const Manifest& manifest,
                                        const ClassificationTable& classes,
                                        const MappingTable& mapping,
                                        const DurationLimits& limits = {}) {
  ValidationReport report;
  std::unordered_map<std::string, std::size_t> first_raw;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    if (e.duration_s < limits.min_s || e.duration_s > limits.max_s) {
      report.add({i, 0, IssueKind::DurationOutlier,
                  e.id + ": duration " + detail_corpus::format_duration(e.duration_s) + " s"});
    }
    try {
      to_phonemes(e.normalized, mapping, classes);
    } catch (const Error&) {
      report.add({i, 0, IssueKind::Unmapped, e.id + ": normalized text does not map"});
    }
    try {
      const AudioBuffer buf = read_wav(detail_corpus::join_path(manifest.base_dir, e.wav_path));
      const TrimResult trimmed = trim_silence(buf, TrimConfig{});
      if (trimmed.all_silent) {
        report.add({i, 0, IssueKind::SilentAudio, e.id + ": audio below silence threshold"});
      }
    } catch (const Error&) {
      report.add({i, 0, IssueKind::BadAudio, e.id + ": audio unreadable"});
    }
    const auto [it, inserted] = first_raw.emplace(e.raw, i);
    if (!inserted) {
      report.add({i, 0, IssueKind::DuplicateText,
                  e.id + ": same text as " + manifest.entries[it->second].id});
    }
  }
  return report;
}

}  // namespace mayektts
