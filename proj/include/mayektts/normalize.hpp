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

// Text canonicalization. Passes run in a fixed order:
//
//   1. Unicode NFC
//   2. punctuation map (codepoint rewrites, including ASCII digits to
//      Meetei Mayek digits)
//   3. spelling variants (longest match anywhere)
//   4. abbreviations (longest match, token-bounded)
//   5. digit-run expansion (digit-by-digit via the lexicon, space-wrapped)
//   6. whitespace collapse and trim
//
// Replacements are never rescanned within a pass, and rule files are checked
// at load time so that every rule value reaches a fixpoint under the full
// pipeline; together these make normalize_text idempotent.
//
// Each rule application is tracked through later passes, so the result maps
// normalized-output spans back to raw-input spans. Whitespace canonicalization
// adjusts spans but is not itself recorded as a rule.

#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/stringpiece.h>

#include "mayektts/common.hpp"
#include "mayektts/textio.hpp"
#include "mayektts/unicode.hpp"

namespace mayektts {

struct ProvenanceEntry {
  uint32_t raw_begin = 0;  // byte span in the raw input
  uint32_t raw_end = 0;
  uint32_t out_begin = 0;  // byte span in the normalized output
  uint32_t out_end = 0;
  std::string rule;
};

struct NormalizedText {
  std::string text;
  std::vector<ProvenanceEntry> provenance;
};

enum class DigitMode { DigitByDigit };

inline bool is_meetei_digit(char32_t cp) { return cp >= 0xABF0 && cp <= 0xABF9; }

struct NormRules {
  std::unordered_map<char32_t, std::string> punct;
  // Both lists are kept sorted by descending key byte length (longest match).
  std::vector<std::pair<std::string, std::string>> variants;
  std::vector<std::pair<std::string, std::string>> abbreviations;
  std::array<std::string, 10> digit_words{};  // empty string = no entry

  static NormRules parse(std::string_view contents, const std::string& origin);
  static NormRules load(const std::string& path);
};

// Expands a run of Meetei Mayek digits to space-joined lexicon words.
inline std::string expand_digits(std::string_view run, const std::array<std::string, 10>& lexicon,
                                 DigitMode mode = DigitMode::DigitByDigit) {
  (void)mode;  // DigitByDigit is the only mode
  std::string out;
  for (const auto& c : decode_utf8(run)) {
    if (!is_meetei_digit(c.cp)) {
      throw Error(ErrorCode::UnmappedCharacter, "expand_digits: not a digit codepoint");
    }
    const auto& word = lexicon[c.cp - 0xABF0];
    if (word.empty()) {
      throw Error(ErrorCode::MissingLexeme,
                  "no lexicon word for digit " + std::to_string(c.cp - 0xABF0));
    }
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

inline std::string nfc_string(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n2 = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::IoError, "NFC normalizer unavailable");
  std::string out;
  icu::StringByteSink<std::string> sink(&out);
  n2->normalizeUTF8(0, icu::StringPiece(s.data(), static_cast<int32_t>(s.size())), sink, nullptr,
                    status);
  if (U_FAILURE(status)) throw Error(ErrorCode::IoError, "NFC normalization failed");
  return out;
}

namespace detail_norm {

// One replacement made by a pass, in that pass's input/output coordinates.
struct Edit {
  uint32_t in_b, in_e, out_b, out_e;
  std::string rule;
};

struct TrackedEntry {
  uint32_t cur_b, cur_e;  // span in the current (latest) text
  uint32_t raw_b, raw_e;  // span in the raw input, fixed at creation
  std::string rule;
};

// Composes per-pass edit lists into raw-to-final span attribution. Two
// monotone maps are maintained per text version: the raw offset where content
// starting at a position begins (begin map) and where content ending at a
// position ends (end map).
class ProvenanceTracker {
 public:
  explicit ProvenanceTracker(std::size_t raw_len) : raw_b_(raw_len + 1), raw_e_(raw_len + 1) {
    for (std::size_t i = 0; i <= raw_len; ++i) raw_b_[i] = raw_e_[i] = static_cast<uint32_t>(i);
  }

  // `edits` must be ordered and non-overlapping in the current coordinates.
  // record=false remaps existing spans without adding entries (whitespace
  // pass). record=true adds one entry per edit; existing entries overlapped
  // by an edit are folded into that edit's raw span.
  void apply(const std::vector<Edit>& edits, std::size_t out_len, bool record) {
    const std::size_t in_len = raw_b_.size() - 1;

    // Pointwise position map f over [0, in_len]. Positions strictly inside an
    // edit clamp into the edit's output span; boundaries shift exactly.
    std::vector<uint32_t> f(in_len + 1);
    {
      std::size_t pi = 0, po = 0;
      for (const auto& e : edits) {
        for (std::size_t j = 0; pi + j <= e.in_b; ++j) f[pi + j] = static_cast<uint32_t>(po + j);
        for (std::size_t p = e.in_b + 1; p < e.in_e; ++p) {
          f[p] = e.out_b + static_cast<uint32_t>(
                               std::min<std::size_t>(p - e.in_b, e.out_e - e.out_b));
        }
        pi = e.in_e;
        po = e.out_e;
      }
      for (std::size_t j = 0; pi + j <= in_len; ++j) f[pi + j] = static_cast<uint32_t>(po + j);
    }

    std::vector<uint32_t> nb(out_len + 1), ne(out_len + 1);
    {
      std::size_t pi = 0, po = 0;
      for (const auto& e : edits) {
        for (std::size_t j = 0; pi + j <= e.in_b; ++j) {
          nb[po + j] = raw_b_[pi + j];
          ne[po + j] = raw_e_[pi + j];
        }
        for (std::size_t q = e.out_b + 1; q < e.out_e; ++q) {
          nb[q] = raw_b_[e.in_b];
          ne[q] = raw_e_[e.in_e];
        }
        pi = e.in_e;
        po = e.out_e;
      }
      for (std::size_t j = 0; pi + j <= in_len; ++j) {
        nb[po + j] = raw_b_[pi + j];
        ne[po + j] = raw_e_[pi + j];
      }
    }

    std::vector<TrackedEntry> next;
    if (record) {
      std::vector<TrackedEntry> fresh;
      fresh.reserve(edits.size());
      for (const auto& e : edits) {
        fresh.push_back({e.out_b, e.out_e, raw_b_[e.in_b], raw_e_[e.in_e], e.rule});
      }
      for (auto& old : entries_) {
        std::size_t hit = edits.size();
        for (std::size_t k = 0; k < edits.size(); ++k) {
          if (std::max(old.cur_b, edits[k].in_b) < std::min(old.cur_e, edits[k].in_e)) {
            hit = k;
            break;
          }
        }
        if (hit < edits.size()) {
          fresh[hit].raw_b = std::min(fresh[hit].raw_b, old.raw_b);
          fresh[hit].raw_e = std::max(fresh[hit].raw_e, old.raw_e);
        } else {
          old.cur_b = f[old.cur_b];
          old.cur_e = f[old.cur_e];
          if (old.cur_b < old.cur_e) next.push_back(old);
        }
      }
      for (auto& fe : fresh) {
        if (fe.cur_b < fe.cur_e) next.push_back(std::move(fe));
      }
      std::sort(next.begin(), next.end(),
                [](const TrackedEntry& a, const TrackedEntry& b) { return a.cur_b < b.cur_b; });
    } else {
      for (auto& old : entries_) {
        old.cur_b = f[old.cur_b];
        old.cur_e = f[old.cur_e];
        if (old.cur_b < old.cur_e) next.push_back(old);
      }
    }
    entries_ = std::move(next);
    raw_b_ = std::move(nb);
    raw_e_ = std::move(ne);
  }

  std::vector<ProvenanceEntry> finish() && {
    std::vector<ProvenanceEntry> out;
    out.reserve(entries_.size());
    for (auto& e : entries_) {
      out.push_back({e.raw_b, e.raw_e, e.cur_b, e.cur_e, std::move(e.rule)});
    }
    return out;
  }

 private:
  std::vector<uint32_t> raw_b_, raw_e_;
  std::vector<TrackedEntry> entries_;
};

struct PassResult {
  std::string text;
  std::vector<Edit> edits;
};

inline PassResult punct_pass(std::string_view text, const NormRules& rules) {
  PassResult r;
  for (const auto& c : decode_utf8(text)) {
    const auto it = rules.punct.find(c.cp);
    if (it == rules.punct.end()) {
      r.text.append(text.substr(c.offset, c.length));
      continue;
    }
    char cpbuf[16];
    std::snprintf(cpbuf, sizeof cpbuf, "punct:U+%04X", static_cast<uint32_t>(c.cp));
    r.edits.push_back({c.offset, c.offset + c.length, static_cast<uint32_t>(r.text.size()),
                       static_cast<uint32_t>(r.text.size() + it->second.size()), cpbuf});
    r.text += it->second;
  }
  return r;
}

inline bool is_token_delim(char32_t cp) {
  if (is_space_cp(cp)) return true;
  if (cp < 0x80) {
    const char ch = static_cast<char>(cp);
    return !((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9'));
  }
  return cp == 0xABEB;  // sentence-final punctuation delimits tokens
}

// Shared matcher for the variants and abbreviations passes. Rules must be
// sorted by descending key length. When token_bounded, a key only matches at
// a token start and when followed by a delimiter or end of text.
inline PassResult match_pass(std::string_view text,
                             const std::vector<std::pair<std::string, std::string>>& rules,
                             bool token_bounded, const char* rule_prefix) {
  PassResult r;
  const auto chars = decode_utf8(text);
  std::size_t i = 0;
  while (i < chars.size()) {
    const std::size_t at = chars[i].offset;
    const bool at_token_start = i == 0 || is_token_delim(chars[i - 1].cp);
    const std::string* matched_val = nullptr;
    std::size_t matched_len = 0;
    if (!token_bounded || at_token_start) {
      for (const auto& [key, val] : rules) {
        if (text.size() - at < key.size() || text.compare(at, key.size(), key) != 0) continue;
        if (token_bounded) {
          const std::size_t after = at + key.size();
          if (after < text.size()) {
            // The next character starts at a codepoint boundary because keys
            // are whole codepoint sequences.
            const auto rest = decode_utf8(text.substr(after, 4));
            if (rest.empty() || !is_token_delim(rest.front().cp)) continue;
          }
        }
        matched_val = &val;
        matched_len = key.size();
        break;
      }
    }
    if (matched_val) {
      r.edits.push_back({static_cast<uint32_t>(at), static_cast<uint32_t>(at + matched_len),
                         static_cast<uint32_t>(r.text.size()),
                         static_cast<uint32_t>(r.text.size() + matched_val->size()),
                         rule_prefix + std::string(text.substr(at, matched_len))});
      r.text += *matched_val;
      while (i < chars.size() && chars[i].offset < at + matched_len) ++i;
    } else {
      r.text.append(text.substr(chars[i].offset, chars[i].length));
      ++i;
    }
  }
  return r;
}

// Maximal digit runs become space-wrapped word sequences. A run containing a
// digit with no lexicon word passes through untouched for validation to flag.
inline PassResult digits_pass(std::string_view text, const NormRules& rules) {
  PassResult r;
  const auto chars = decode_utf8(text);
  std::size_t i = 0;
  while (i < chars.size()) {
    if (!is_meetei_digit(chars[i].cp)) {
      r.text.append(text.substr(chars[i].offset, chars[i].length));
      ++i;
      continue;
    }
    std::size_t j = i;
    bool expandable = true;
    while (j < chars.size() && is_meetei_digit(chars[j].cp)) {
      if (rules.digit_words[chars[j].cp - 0xABF0].empty()) expandable = false;
      ++j;
    }
    const uint32_t run_b = chars[i].offset;
    const uint32_t run_e = chars[j - 1].offset + chars[j - 1].length;
    if (!expandable) {
      r.text.append(text.substr(run_b, run_e - run_b));
    } else {
      const std::string words =
          " " + expand_digits(text.substr(run_b, run_e - run_b), rules.digit_words) + " ";
      r.edits.push_back({run_b, run_e, static_cast<uint32_t>(r.text.size()),
                         static_cast<uint32_t>(r.text.size() + words.size()), "digits"});
      r.text += words;
    }
    i = j;
  }
  return r;
}

inline PassResult whitespace_pass(std::string_view text) {
  PassResult r;
  const auto chars = decode_utf8(text);
  std::size_t i = 0;
  while (i < chars.size()) {
    if (!is_space_cp(chars[i].cp)) {
      r.text.append(text.substr(chars[i].offset, chars[i].length));
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < chars.size() && is_space_cp(chars[j].cp)) ++j;
    const uint32_t run_b = chars[i].offset;
    const uint32_t run_e = j < chars.size() ? chars[j].offset : static_cast<uint32_t>(text.size());
    const bool edge = i == 0 || j == chars.size();
    const std::string replacement = edge ? "" : " ";
    if (run_e - run_b != replacement.size() || (!edge && text[run_b] != ' ')) {
      r.edits.push_back({run_b, run_e, static_cast<uint32_t>(r.text.size()),
                         static_cast<uint32_t>(r.text.size() + replacement.size()), "ws"});
    }
    r.text += replacement;
    i = j;
  }
  return r;
}

}  // namespace detail_norm

inline NormalizedText normalize_text(std::string_view raw, const NormRules& rules) {
  std::string text(raw);
  detail_norm::ProvenanceTracker tracker(text.size());

  auto run = [&](detail_norm::PassResult r, bool record) {
    tracker.apply(r.edits, r.text.size(), record);
    text = std::move(r.text);
  };

  std::string canon = nfc_string(text);
  if (canon != text) {
    std::vector<detail_norm::Edit> e{{0, static_cast<uint32_t>(text.size()), 0,
                                      static_cast<uint32_t>(canon.size()), "nfc"}};
    tracker.apply(e, canon.size(), true);
    text = std::move(canon);
  }

  run(detail_norm::punct_pass(text, rules), true);
  run(detail_norm::match_pass(text, rules.variants, false, "variant:"), true);
  run(detail_norm::match_pass(text, rules.abbreviations, true, "abbrev:"), true);
  run(detail_norm::digits_pass(text, rules), true);
  run(detail_norm::whitespace_pass(text), false);

  return {std::move(text), std::move(tracker).finish()};
}

// Load-time convergence check: every rule value must reach a fixpoint under
// the full pipeline after at most one application. Rejects rewrite cycles, so
// idempotence of normalize_text holds for any rules that load successfully.
inline void validate_rules(const NormRules& rules, const std::string& origin) {
  auto check = [&](const std::string& value, const std::string& what) {
    const std::string n1 = normalize_text(value, rules).text;
    const std::string n2 = normalize_text(n1, rules).text;
    if (n2 != n1) {
      throw Error(ErrorCode::BadTableFile,
                  origin + ": " + what + " value does not reach a fixpoint");
    }
  };
  for (const auto& [cp, v] : rules.punct) check(v, "punct");
  for (const auto& [k, v] : rules.variants) check(v, "variant '" + k + "'");
  for (const auto& [k, v] : rules.abbreviations) check(v, "abbreviation '" + k + "'");
  for (std::size_t d = 0; d < 10; ++d) {
    const auto& w = rules.digit_words[d];
    if (w.empty()) continue;
    for (const auto& c : decode_utf8(w)) {
      if (is_meetei_digit(c.cp)) {
        throw Error(ErrorCode::BadTableFile,
                    origin + ": digit word for " + std::to_string(d) + " contains a digit");
      }
    }
    check(w, "digit");
  }
}

inline NormRules NormRules::parse(std::string_view contents, const std::string& origin) {
  NormRules rules;
  enum class Section { None, Punct, Variants, Abbrev, Digits } section = Section::None;
  std::size_t lineno = 0;
  for (auto raw_line : split_lines(contents)) {
    ++lineno;
    const auto line = trim_view(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto ctx = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line == "[punct]") section = Section::Punct;
      else if (line == "[variants]") section = Section::Variants;
      else if (line == "[abbrev]") section = Section::Abbrev;
      else if (line == "[digits]") section = Section::Digits;
      else throw Error(ErrorCode::BadTableFile, ctx + ": unknown section " + std::string(line));
      continue;
    }
    const auto cols = split_on(line, '\t');
    if (section == Section::None) {
      throw Error(ErrorCode::BadTableFile, ctx + ": entry before any section header");
    }
    // [punct] deletions are written as a bare codepoint with no replacement.
    const bool bare_delete = section == Section::Punct && cols.size() == 1;
    if (cols.size() != 2 && !bare_delete) {
      throw Error(ErrorCode::BadTableFile, ctx + ": expected 2 columns");
    }
    const auto key = trim_view(cols[0]);
    const auto value = bare_delete ? std::string_view{} : trim_view(cols[1]);
    switch (section) {
      case Section::Punct: {
        const char32_t cp = parse_hex_codepoint(key, ctx);
        std::string repl;
        if (!value.empty()) {
          for (auto part : split_on(value, ' ')) {
            if (part.empty()) continue;
            append_utf8(repl, parse_hex_codepoint(part, ctx));
          }
        }
        if (!rules.punct.emplace(cp, std::move(repl)).second) {
          throw Error(ErrorCode::BadTableFile, ctx + ": duplicate punct codepoint");
        }
        break;
      }
      case Section::Variants:
      case Section::Abbrev: {
        if (key.empty()) throw Error(ErrorCode::BadTableFile, ctx + ": empty key");
        auto& list = section == Section::Variants ? rules.variants : rules.abbreviations;
        list.emplace_back(std::string(key), std::string(value));
        break;
      }
      case Section::Digits: {
        if (key.size() != 1 || key[0] < '0' || key[0] > '9') {
          throw Error(ErrorCode::BadTableFile, ctx + ": digit key must be 0-9");
        }
        if (value.empty()) throw Error(ErrorCode::BadTableFile, ctx + ": empty digit word");
        rules.digit_words[key[0] - '0'] = std::string(value);
        break;
      }
      case Section::None: break;
    }
  }
  auto by_key_len = [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); };
  std::stable_sort(rules.variants.begin(), rules.variants.end(), by_key_len);
  std::stable_sort(rules.abbreviations.begin(), rules.abbreviations.end(), by_key_len);
  return rules;
}

inline NormRules NormRules::load(const std::string& path) {
  NormRules rules = parse(read_text_file(path), path);
  validate_rules(rules, path);
  return rules;
}

}  // namespace mayektts
