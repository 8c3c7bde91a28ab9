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

// Rule-based grapheme-to-phoneme conversion over segmented syllables.
//
// Emission per syllable: onset phones, cluster phones, then the vowel sign's
// phones or the inherent vowel. Independent vowel letters declared with
// `!no_inherent` carry their own nucleus, so the inherent vowel is suppressed
// after them. A falling-tone mark appends the tone suffix to the nucleus
// symbol (the last symbol of the vowel-group emission). Whitespace and
// punctuation emit word boundaries, recorded as indices, not symbols.

#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mayektts/common.hpp"
#include "mayektts/script.hpp"
#include "mayektts/textio.hpp"

namespace mayektts {

inline constexpr int kPadId = 0;
inline constexpr int kEosId = 1;

struct PhonemeSeq {
  std::vector<std::string> phones;
  // Index i marks a word break before phones[i]; strictly increasing, each in
  // (0, phones.size()).
  std::vector<std::size_t> word_boundaries;
};

struct MappingTable {
  std::unordered_map<char32_t, std::vector<std::string>> onsets;
  std::unordered_map<char32_t, std::vector<std::string>> vowels;
  std::unordered_map<char32_t, std::vector<std::string>> finals;
  std::string inherent;
  std::string tone_suffix;
  std::unordered_set<char32_t> no_inherent;

  std::vector<std::string> inventory;  // [0]=PAD, [1]=EOS, rest sorted unique
  std::unordered_map<std::string, int> ids;

  int id_of(const std::string& symbol) const {
    const auto it = ids.find(symbol);
    if (it == ids.end()) {
      throw Error(ErrorCode::UnknownSymbol, "symbol not in inventory: " + symbol);
    }
    return it->second;
  }

  static MappingTable parse(std::string_view contents, const std::string& origin);
  static MappingTable load(const std::string& path) {
    return parse(read_text_file(path), path);
  }
};

namespace detail_g2p {

inline std::vector<std::string> parse_phone_list(std::string_view s) {
  std::vector<std::string> out;
  for (auto part : split_on(s, ' ')) {
    part = trim_view(part);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

}  // namespace detail_g2p

inline MappingTable MappingTable::parse(std::string_view contents, const std::string& origin) {
  MappingTable t;
  std::size_t lineno = 0;
  for (auto raw_line : split_lines(contents)) {
    ++lineno;
    const auto line = trim_view(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto ctx = origin + ":" + std::to_string(lineno);
    const auto cols = split_on(line, '\t');
    if (line.front() == '!') {
      if (cols.size() != 2) throw Error(ErrorCode::BadTableFile, ctx + ": directive needs a value");
      const auto directive = trim_view(cols[0]);
      const auto value = trim_view(cols[1]);
      if (directive == "!inherent") {
        t.inherent = std::string(value);
      } else if (directive == "!tone_suffix") {
        t.tone_suffix = std::string(value);
      } else if (directive == "!no_inherent") {
        for (auto part : split_on(value, ' ')) {
          part = trim_view(part);
          if (!part.empty()) t.no_inherent.insert(parse_hex_codepoint(part, ctx));
        }
      } else {
        throw Error(ErrorCode::BadTableFile, ctx + ": unknown directive " + std::string(cols[0]));
      }
      continue;
    }
    if (cols.size() < 2) throw Error(ErrorCode::BadTableFile, ctx + ": expected 3 columns");
    const char32_t cp = parse_hex_codepoint(trim_view(cols[0]), ctx);
    const auto role = trim_view(cols[1]);
    auto phones = detail_g2p::parse_phone_list(cols.size() >= 3 ? cols[2] : std::string_view{});
    auto insert = [&](std::unordered_map<char32_t, std::vector<std::string>>& map) {
      if (!map.emplace(cp, std::move(phones)).second) {
        throw Error(ErrorCode::BadTableFile, ctx + ": duplicate entry for codepoint");
      }
    };
    if (role == "ONSET") insert(t.onsets);
    else if (role == "VOWEL") insert(t.vowels);
    else if (role == "FINAL") insert(t.finals);
    else throw Error(ErrorCode::BadTableFile, ctx + ": unknown role '" + std::string(role) + "'");
  }

  if (t.inherent.empty()) throw Error(ErrorCode::BadTableFile, origin + ": missing !inherent");
  if (t.tone_suffix.empty()) throw Error(ErrorCode::BadTableFile, origin + ": missing !tone_suffix");

  // Inventory: PAD, EOS, then every emittable symbol including tone-suffixed
  // variants of every possible nucleus symbol, sorted and deduplicated.
  std::vector<std::string> symbols;
  auto add_all = [&](const std::unordered_map<char32_t, std::vector<std::string>>& map) {
    for (const auto& [cp, ph] : map) symbols.insert(symbols.end(), ph.begin(), ph.end());
  };
  add_all(t.onsets);
  add_all(t.vowels);
  add_all(t.finals);
  symbols.push_back(t.inherent);
  std::vector<std::string> nuclei;
  for (const auto& [cp, ph] : t.vowels) {
    if (!ph.empty()) nuclei.push_back(ph.back());
  }
  nuclei.push_back(t.inherent);
  for (const char32_t cp : t.no_inherent) {
    const auto it = t.onsets.find(cp);
    if (it == t.onsets.end()) {
      throw Error(ErrorCode::BadTableFile, origin + ": !no_inherent codepoint has no ONSET entry");
    }
    if (!it->second.empty()) nuclei.push_back(it->second.back());
  }
  for (const auto& n : nuclei) symbols.push_back(n + t.tone_suffix);

  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  for (const auto& s : symbols) {
    if (s == "PAD" || s == "EOS") {
      throw Error(ErrorCode::BadTableFile, origin + ": phoneme symbol collides with " + s);
    }
  }
  t.inventory.reserve(symbols.size() + 2);
  t.inventory.emplace_back("PAD");
  t.inventory.emplace_back("EOS");
  t.inventory.insert(t.inventory.end(), symbols.begin(), symbols.end());
  for (std::size_t i = 0; i < t.inventory.size(); ++i) t.ids[t.inventory[i]] = static_cast<int>(i);
  return t;
}

inline PhonemeSeq to_phonemes(std::string_view normalized, const MappingTable& table,
                              const ClassificationTable& classes) {
  PhonemeSeq seq;
  bool pending_boundary = false;
  auto emit = [&](const std::string& symbol) {
    if (pending_boundary && !seq.phones.empty()) {
      seq.word_boundaries.push_back(seq.phones.size());
    }
    pending_boundary = false;
    seq.phones.push_back(symbol);
  };
  auto lookup = [&](const std::unordered_map<char32_t, std::vector<std::string>>& map,
                    char32_t cp, uint32_t at) -> const std::vector<std::string>& {
    const auto it = map.find(cp);
    if (it == map.end()) {
      throw Error(ErrorCode::UnmappedCharacter,
                  "no mapping for " + detail::describe_cp(cp) + " at byte " + std::to_string(at));
    }
    return it->second;
  };

  for (const auto& tok : segment(normalized, classes)) {
    switch (tok.kind) {
      case TokenKind::Space:
      case TokenKind::Punct:
        pending_boundary = true;
        break;
      case TokenKind::Digit:
        throw Error(ErrorCode::UnmappedCharacter,
                    "digit " + detail::describe_cp(tok.cp) + " in text at byte " +
                        std::to_string(tok.begin) + " (expand digits first)");
      case TokenKind::Syllable: {
        const auto& s = tok.syl;
        for (const auto& p : lookup(table.onsets, s.onset, tok.begin)) emit(p);
        std::ptrdiff_t nucleus = -1;
        const char32_t last_onset = s.cluster != 0 ? s.cluster : s.onset;
        if (s.cluster != 0) {
          const auto& cl = lookup(table.onsets, s.cluster, tok.begin);
          for (const auto& p : cl) emit(p);
        }
        if (s.vowel != 0) {
          const auto& vw = lookup(table.vowels, s.vowel, tok.begin);
          for (const auto& p : vw) emit(p);
          if (!vw.empty()) nucleus = static_cast<std::ptrdiff_t>(seq.phones.size()) - 1;
        } else if (table.no_inherent.count(last_onset) != 0 &&
                   !lookup(table.onsets, last_onset, tok.begin).empty()) {
          nucleus = static_cast<std::ptrdiff_t>(seq.phones.size()) - 1;
        } else {
          emit(table.inherent);
          nucleus = static_cast<std::ptrdiff_t>(seq.phones.size()) - 1;
        }
        if (s.final_cp != 0) {
          for (const auto& p : lookup(table.finals, s.final_cp, tok.begin)) emit(p);
        }
        if (s.tone != 0 && nucleus >= 0) {
          seq.phones[static_cast<std::size_t>(nucleus)] += table.tone_suffix;
        }
        break;
      }
      case TokenKind::Foreign:
      case TokenKind::StrayMark:
        // unreachable: strict segmentation throws first
        break;
    }
  }
  return seq;
}

inline std::vector<int> phonemes_to_ids(const std::vector<std::string>& phones,
                                        const MappingTable& table, bool append_eos) {
  std::vector<int> ids;
  ids.reserve(phones.size() + (append_eos ? 1 : 0));
  for (const auto& p : phones) ids.push_back(table.id_of(p));
  if (append_eos) ids.push_back(kEosId);
  return ids;
}

inline std::vector<int> phonemes_to_ids(const PhonemeSeq& seq, const MappingTable& table,
                                        bool append_eos) {
  return phonemes_to_ids(seq.phones, table, append_eos);
}

inline std::vector<std::string> ids_to_phonemes(const std::vector<int>& ids,
                                                const MappingTable& table) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= table.inventory.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "phoneme id out of range: " + std::to_string(id));
    }
    out.push_back(table.inventory[static_cast<std::size_t>(id)]);
  }
  return out;
}

}  // namespace mayektts
