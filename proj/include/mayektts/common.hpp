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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mayektts {

enum class ErrorCode {
  // text / tables
  BadTableFile,
  OrphanMark,
  MissingLexeme,
  UnmappedCharacter,
  UnknownSymbol,
  // audio
  UnsupportedFormat,
  CorruptHeader,
  EmptySignal,
  SilentInput,
  // numeric kernels
  ShapeMismatch,
  IndexOutOfRange,
  InvalidP,
  // weight files
  BadMagic,
  TruncatedFile,
  // corpus
  MissingTextFile,
  DuplicateId,
  TooFewSamples,
  MixedSampleRates,
  // misc
  BadConfig,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadTableFile: return "BadTableFile";
    case ErrorCode::OrphanMark: return "OrphanMark";
    case ErrorCode::MissingLexeme: return "MissingLexeme";
    case ErrorCode::UnmappedCharacter: return "UnmappedCharacter";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::SilentInput: return "SilentInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::MissingTextFile: return "MissingTextFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MixedSampleRates: return "MixedSampleRates";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Issues are the non-throwing error channel: validation collects them
// instead of aborting so a whole corpus can be checked in one pass.
enum class IssueKind {
  Foreign,
  OrphanMark,
  Unmapped,
  MissingAudio,
  BadAudio,
  DurationOutlier,
  SilentAudio,
  DuplicateText,
  DuplicateId,
  BadLine,
};

inline const char* issue_kind_name(IssueKind k) {
  switch (k) {
    case IssueKind::Foreign: return "foreign";
    case IssueKind::OrphanMark: return "orphan-mark";
    case IssueKind::Unmapped: return "unmapped";
    case IssueKind::MissingAudio: return "missing-audio";
    case IssueKind::BadAudio: return "bad-audio";
    case IssueKind::DurationOutlier: return "duration-outlier";
    case IssueKind::SilentAudio: return "silent-audio";
    case IssueKind::DuplicateText: return "duplicate-text";
    case IssueKind::DuplicateId: return "duplicate-id";
    case IssueKind::BadLine: return "bad-line";
  }
  return "unknown";
}

// For script issues `offset` is a byte offset and `codepoint` the offending
// character; corpus-level issues reuse `offset` as a line number with
// codepoint 0.
struct Issue {
  std::size_t offset = 0;
  char32_t codepoint = 0;
  IssueKind kind = IssueKind::BadLine;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const { return issues.empty(); }

  void add(std::size_t offset, char32_t cp, IssueKind kind, std::string message) {
    issues.push_back(Issue{offset, cp, kind, std::move(message)});
  }

  void add(Issue issue) { issues.push_back(std::move(issue)); }
};

}  // namespace mayektts
