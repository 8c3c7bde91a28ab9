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

// Meetei Mayek script handling: a data-driven character classification table
// and a syllable segmenter.
//
// The script is an abugida. A written syllable is
//
//   Onset (Killer Onset)? VowelSign? Final? Tone?
//
// where every mark attaches to the letter before it. Segmentation is a single
// greedy left-to-right pass: each optional slot is taken if and only if the
// next character fits it. Digits, punctuation, and whitespace stand alone.
// Re-serializing the token stream reproduces the input bytes exactly.

#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mayektts/common.hpp"
#include "mayektts/textio.hpp"
#include "mayektts/unicode.hpp"

namespace mayektts {

enum class CharCategory {
  Onset,       // full consonant or independent vowel letter
  Final,       // syllable-final letter (lonsum), plus the nasal sign
  VowelSign,   // dependent vowel (cheitap)
  ToneMark,    // heavy-tone mark (lum)
  KillerMark,  // vowel killer joining a consonant cluster (apun)
  Digit,
  Punct,
  Space,
  Foreign,     // not in the table; never a valid table entry
};

inline const char* char_category_name(CharCategory c) {
  switch (c) {
    case CharCategory::Onset: return "Onset";
    case CharCategory::Final: return "Final";
    case CharCategory::VowelSign: return "VowelSign";
    case CharCategory::ToneMark: return "ToneMark";
    case CharCategory::KillerMark: return "KillerMark";
    case CharCategory::Digit: return "Digit";
    case CharCategory::Punct: return "Punct";
    case CharCategory::Space: return "Space";
    case CharCategory::Foreign: return "Foreign";
  }
  return "?";
}

struct CharClass {
  CharCategory category = CharCategory::Foreign;
  std::string name;
};

// Loaded from a TSV file: `<hex codepoint> <TAB> <category> <TAB> <name>`.
// Lines starting with '#' and blank lines are skipped.
class ClassificationTable {
 public:
  static ClassificationTable parse(std::string_view contents, const std::string& origin) {
    ClassificationTable t;
    std::size_t lineno = 0;
    for (auto raw : split_lines(contents)) {
      ++lineno;
      const auto line = trim_view(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto ctx = origin + ":" + std::to_string(lineno);
      const auto cols = split_on(line, '\t');
      if (cols.size() < 2) throw Error(ErrorCode::BadTableFile, ctx + ": expected at least 2 columns");
      const char32_t cp = parse_hex_codepoint(trim_view(cols[0]), ctx);
      const auto cat = parse_category_(trim_view(cols[1]), ctx);
      CharClass cls;
      cls.category = cat;
      if (cols.size() >= 3) cls.name = std::string(trim_view(cols[2]));
      if (t.map_.count(cp)) throw Error(ErrorCode::BadTableFile, ctx + ": duplicate codepoint");
      t.map_.emplace(cp, std::move(cls));
    }
    if (t.map_.empty()) throw Error(ErrorCode::BadTableFile, origin + ": no entries");
    return t;
  }

  static ClassificationTable load(const std::string& path) {
    return parse(read_text_file(path), path);
  }

  CharCategory classify(char32_t cp) const {
    const auto it = map_.find(cp);
    return it == map_.end() ? CharCategory::Foreign : it->second.category;
  }

  // Empty string for unknown codepoints.
  const std::string& name_of(char32_t cp) const {
    static const std::string empty;
    const auto it = map_.find(cp);
    return it == map_.end() ? empty : it->second.name;
  }

  bool contains(char32_t cp) const { return map_.count(cp) != 0; }
  std::size_t size() const { return map_.size(); }

 private:
  static CharCategory parse_category_(std::string_view s, const std::string& ctx) {
    if (s == "Onset") return CharCategory::Onset;
    if (s == "Final") return CharCategory::Final;
    if (s == "VowelSign") return CharCategory::VowelSign;
    if (s == "ToneMark") return CharCategory::ToneMark;
    if (s == "KillerMark") return CharCategory::KillerMark;
    if (s == "Digit") return CharCategory::Digit;
    if (s == "Punct") return CharCategory::Punct;
    if (s == "Space") return CharCategory::Space;
    throw Error(ErrorCode::BadTableFile, ctx + ": unknown category '" + std::string(s) + "'");
  }

  std::unordered_map<char32_t, CharClass> map_;
};

// Slots are 0 when absent. `killer` is nonzero exactly when `cluster` is.
struct Syllable {
  char32_t onset = 0;
  char32_t killer = 0;
  char32_t cluster = 0;
  char32_t vowel = 0;
  char32_t final_cp = 0;
  char32_t tone = 0;
};

enum class TokenKind {
  Syllable,
  Digit,
  Punct,
  Space,
  Foreign,    // unclassified codepoint (lenient mode only)
  StrayMark,  // mark with no letter to attach to (lenient mode only)
};

struct ScriptToken {
  TokenKind kind = TokenKind::Foreign;
  Syllable syl;        // meaningful when kind == Syllable
  char32_t cp = 0;     // meaningful for single-codepoint kinds
  uint32_t begin = 0;  // byte span in the source string
  uint32_t end = 0;
};

namespace detail {

inline std::string describe_cp(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<uint32_t>(cp));
  return buf;
}

// One pass over the decoded text. `report` collects issues in lenient mode;
// when null, the first issue throws instead.
inline std::vector<ScriptToken> segment_impl(std::string_view text,
                                             const ClassificationTable& table,
                                             ValidationReport* report) {
  const auto chars = decode_utf8(text);
  std::vector<ScriptToken> tokens;
  tokens.reserve(chars.size());

  auto category_at = [&](std::size_t i) {
    return i < chars.size() ? table.classify(chars[i].cp) : CharCategory::Foreign;
  };

  std::size_t i = 0;
  while (i < chars.size()) {
    const auto& c = chars[i];
    const auto cat = table.classify(c.cp);
    ScriptToken tok;
    tok.begin = c.offset;
    tok.cp = c.cp;
    switch (cat) {
      case CharCategory::Onset: {
        tok.kind = TokenKind::Syllable;
        tok.syl.onset = c.cp;
        ++i;
        if (category_at(i) == CharCategory::KillerMark &&
            category_at(i + 1) == CharCategory::Onset) {
          tok.syl.killer = chars[i].cp;
          tok.syl.cluster = chars[i + 1].cp;
          i += 2;
        }
        if (category_at(i) == CharCategory::VowelSign) {
          tok.syl.vowel = chars[i].cp;
          ++i;
        }
        if (category_at(i) == CharCategory::Final) {
          tok.syl.final_cp = chars[i].cp;
          ++i;
        }
        if (category_at(i) == CharCategory::ToneMark) {
          tok.syl.tone = chars[i].cp;
          ++i;
        }
        tok.end = chars[i - 1].offset + chars[i - 1].length;
        break;
      }
      case CharCategory::Digit:
      case CharCategory::Punct:
      case CharCategory::Space: {
        tok.kind = cat == CharCategory::Digit  ? TokenKind::Digit
                   : cat == CharCategory::Punct ? TokenKind::Punct
                                                : TokenKind::Space;
        tok.end = c.offset + c.length;
        ++i;
        break;
      }
      case CharCategory::Foreign: {
        const auto msg = "foreign character " + describe_cp(c.cp);
        if (!report) throw Error(ErrorCode::UnmappedCharacter, msg + " at byte " + std::to_string(c.offset));
        report->add(c.offset, c.cp, IssueKind::Foreign, msg);
        tok.kind = TokenKind::Foreign;
        tok.end = c.offset + c.length;
        ++i;
        break;
      }
      default: {  // VowelSign, Final, ToneMark, KillerMark with nothing to attach to
        const auto msg = std::string(char_category_name(cat)) + " " + describe_cp(c.cp) +
                         " has no preceding letter";
        if (!report) throw Error(ErrorCode::OrphanMark, msg + " at byte " + std::to_string(c.offset));
        report->add(c.offset, c.cp, IssueKind::OrphanMark, msg);
        tok.kind = TokenKind::StrayMark;
        tok.end = c.offset + c.length;
        ++i;
        break;
      }
    }
    tokens.push_back(tok);
  }
  return tokens;
}

}  // namespace detail

// Strict segmentation: throws on foreign characters and orphaned marks.
inline std::vector<ScriptToken> segment(std::string_view text, const ClassificationTable& table) {
  return detail::segment_impl(text, table, nullptr);
}

// Lenient segmentation: bad characters become Foreign / StrayMark tokens and
// are recorded in the report, so the token stream still covers every byte.
inline std::vector<ScriptToken> segment_lenient(std::string_view text,
                                                const ClassificationTable& table,
                                                ValidationReport& report) {
  return detail::segment_impl(text, table, &report);
}

inline ValidationReport validate_script(std::string_view text, const ClassificationTable& table) {
  ValidationReport report;
  detail::segment_impl(text, table, &report);
  return report;
}

inline void append_syllable(std::string& out, const Syllable& s) {
  append_utf8(out, s.onset);
  if (s.cluster != 0) {
    append_utf8(out, s.killer);
    append_utf8(out, s.cluster);
  }
  if (s.vowel != 0) append_utf8(out, s.vowel);
  if (s.final_cp != 0) append_utf8(out, s.final_cp);
  if (s.tone != 0) append_utf8(out, s.tone);
}

// Inverse of segmentation: concatenating all tokens reproduces the source.
inline std::string serialize(const std::vector<ScriptToken>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Syllable) {
      append_syllable(out, t.syl);
    } else {
      append_utf8(out, t.cp);
    }
  }
  return out;
}

}  // namespace mayektts
