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

// WAV I/O (RIFF PCM16 only) and the audio preparation ops: energy-gated
// silence trimming, RMS loudness normalization, and Kaiser windowed-sinc
// resampling.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "mayektts/common.hpp"

namespace mayektts {

struct AudioBuffer {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  uint32_t sample_rate = 0;

  double duration_s() const {
    return sample_rate == 0 ? 0.0 : static_cast<double>(samples.size()) / sample_rate;
  }
};

namespace detail_wav {

inline uint32_t read_u32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
inline uint16_t read_u16(const unsigned char* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

inline void put_u32(std::string& s, uint32_t v) {
  s.push_back(char(v & 0xFF));
  s.push_back(char(v >> 8 & 0xFF));
  s.push_back(char(v >> 16 & 0xFF));
  s.push_back(char(v >> 24 & 0xFF));
}
inline void put_u16(std::string& s, uint16_t v) {
  s.push_back(char(v & 0xFF));
  s.push_back(char(v >> 8 & 0xFF));
}

}  // namespace detail_wav

inline AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open wav: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const auto need = [&](std::size_t at, std::size_t n) {
    if (at + n > bytes.size()) throw Error(ErrorCode::CorruptHeader, "truncated wav: " + path);
  };
  need(0, 12);
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::CorruptHeader, "not a RIFF/WAVE file: " + path);
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  uint32_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t len = detail_wav::read_u32(bytes.data() + pos + 4);
    need(pos + 8, len);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw Error(ErrorCode::CorruptHeader, "short fmt chunk: " + path);
      const unsigned char* f = bytes.data() + pos + 8;
      format = detail_wav::read_u16(f);
      channels = detail_wav::read_u16(f + 2);
      rate = detail_wav::read_u32(f + 4);
      bits = detail_wav::read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr) {
    throw Error(ErrorCode::CorruptHeader, "missing fmt or data chunk: " + path);
  }
  if (format != 1) throw Error(ErrorCode::UnsupportedFormat, "non-PCM wav: " + path);
  if (bits != 16) throw Error(ErrorCode::UnsupportedFormat, "only 16-bit PCM supported: " + path);
  if (channels != 1 && channels != 2) {
    throw Error(ErrorCode::UnsupportedFormat, "only mono/stereo supported: " + path);
  }
  if (rate == 0) throw Error(ErrorCode::CorruptHeader, "zero sample rate: " + path);

  AudioBuffer buf;
  buf.sample_rate = rate;
  const std::size_t n_frames = data_len / (2u * channels);
  buf.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (unsigned c = 0; c < channels; ++c) {
      const auto raw = detail_wav::read_u16(data + 2 * (i * channels + c));
      acc += static_cast<int16_t>(raw) / 32768.0;
    }
    buf.samples[i] = acc / channels;
  }
  return buf;
}

inline void write_wav(const std::string& path, const AudioBuffer& buf) {
  if (buf.sample_rate == 0) throw Error(ErrorCode::BadConfig, "write_wav: zero sample rate");
  std::string out;
  const uint32_t data_len = static_cast<uint32_t>(buf.samples.size() * 2);
  out.reserve(44 + data_len);
  out += "RIFF";
  detail_wav::put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  detail_wav::put_u32(out, 16);
  detail_wav::put_u16(out, 1);   // PCM
  detail_wav::put_u16(out, 1);   // mono
  detail_wav::put_u32(out, buf.sample_rate);
  detail_wav::put_u32(out, buf.sample_rate * 2);  // byte rate
  detail_wav::put_u16(out, 2);   // block align
  detail_wav::put_u16(out, 16);  // bits
  out += "data";
  detail_wav::put_u32(out, data_len);
  for (const double x : buf.samples) {
    const auto q = std::llround(x * 32768.0);  // round half away from zero
    const auto v = static_cast<int16_t>(std::clamp<long long>(q, -32768, 32767));
    detail_wav::put_u16(out, static_cast<uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write wav: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::IoError, "short write: " + path);
}

struct TrimConfig {
  double threshold_db = -40.0;
  uint32_t frame_ms = 20;
  uint32_t hop_ms = 10;
  uint32_t keep_pad_ms = 50;
};

struct TrimResult {
  AudioBuffer audio;
  bool all_silent = false;
};

// Frame RMS gating on a fixed hop grid. The kept span is
// [first_active.start - pad, last_active.start + hop + pad), clamped to the
// signal; pad is rounded up to a hop multiple so re-trimming sees the same
// frame grid, which makes the op idempotent.
inline TrimResult trim_silence(const AudioBuffer& buf, const TrimConfig& cfg) {
  if (buf.samples.empty()) throw Error(ErrorCode::EmptySignal, "trim_silence: empty buffer");
  if (cfg.hop_ms == 0 || cfg.frame_ms < cfg.hop_ms) {
    throw Error(ErrorCode::BadConfig, "trim_silence: need frame_ms >= hop_ms > 0");
  }
  auto ms_to_samples = [&](uint32_t ms) {
    return static_cast<std::size_t>((uint64_t(buf.sample_rate) * ms + 500) / 1000);
  };
  const std::size_t frame = ms_to_samples(cfg.frame_ms);
  const std::size_t hop = ms_to_samples(cfg.hop_ms);
  std::size_t pad = ms_to_samples(cfg.keep_pad_ms);
  pad = (pad + hop - 1) / hop * hop;

  const double thresh = std::pow(10.0, cfg.threshold_db / 20.0);
  const std::size_t n = buf.samples.size();
  std::ptrdiff_t first = -1, last = -1;
  for (std::size_t start = 0; start + frame <= n; start += hop) {
    double acc = 0.0;
    for (std::size_t i = 0; i < frame; ++i) acc += buf.samples[start + i] * buf.samples[start + i];
    const double rms = std::sqrt(acc / static_cast<double>(frame));
    if (rms >= thresh) {
      if (first < 0) first = static_cast<std::ptrdiff_t>(start);
      last = static_cast<std::ptrdiff_t>(start);
    }
  }
  if (first < 0) return {buf, true};  // nothing above threshold (or too short to frame)

  const std::size_t begin =
      static_cast<std::size_t>(first) > pad ? static_cast<std::size_t>(first) - pad : 0;
  const std::size_t end = std::min(n, static_cast<std::size_t>(last) + hop + pad);
  TrimResult r;
  r.audio.sample_rate = buf.sample_rate;
  r.audio.samples.assign(buf.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                         buf.samples.begin() + static_cast<std::ptrdiff_t>(end));
  return r;
}

struct LoudnessResult {
  AudioBuffer audio;
  double gain = 1.0;
  bool peak_limited = false;
};

// Scales to the target RMS in dBFS; if that would push the peak above 1.0,
// the gain is reduced to peak-normalize at 1.0 instead.
inline LoudnessResult normalize_loudness(const AudioBuffer& buf, double target_db = -20.0) {
  if (buf.samples.empty()) throw Error(ErrorCode::EmptySignal, "normalize_loudness: empty buffer");
  double acc = 0.0, peak = 0.0;
  for (const double x : buf.samples) {
    acc += x * x;
    peak = std::max(peak, std::fabs(x));
  }
  const double rms = std::sqrt(acc / static_cast<double>(buf.samples.size()));
  if (rms == 0.0) throw Error(ErrorCode::SilentInput, "normalize_loudness: silent input");

  LoudnessResult r;
  r.gain = std::pow(10.0, target_db / 20.0) / rms;
  if (r.gain * peak > 1.0) {
    r.gain = 1.0 / peak;
    r.peak_limited = true;
  }
  r.audio.sample_rate = buf.sample_rate;
  r.audio.samples.resize(buf.samples.size());
  for (std::size_t i = 0; i < buf.samples.size(); ++i) r.audio.samples[i] = buf.samples[i] * r.gain;
  return r;
}

namespace detail_resample {

inline double kaiser_i0(double x) { return std::cyl_bessel_i(0.0, x); }

// Windowed-sinc lowpass tap at offset tau (in source samples). fc is the
// cutoff in cycles per source sample, half_width the one-sided support.
inline double sinc_tap(double tau, double fc, double half_width, double inv_i0_beta, double beta) {
  if (std::fabs(tau) >= half_width) return 0.0;
  const double pi = 3.14159265358979323846;
  const double t = 2.0 * fc * tau;
  const double sinc = t == 0.0 ? 1.0 : std::sin(pi * t) / (pi * t);
  const double frac = tau / half_width;
  const double window = kaiser_i0(beta * std::sqrt(1.0 - frac * frac)) * inv_i0_beta;
  return 2.0 * fc * sinc * window;
}

}  // namespace detail_resample

// Rational-ratio resampler: Kaiser window (beta 8.6), 32 zero crossings,
// per-phase tap normalization for exact DC gain. Matching rates return a
// bit-identical copy.
inline AudioBuffer resample(const AudioBuffer& buf, uint32_t to_rate) {
  if (to_rate == 0) throw Error(ErrorCode::BadConfig, "resample: zero target rate");
  if (buf.sample_rate == to_rate || buf.samples.empty()) {
    AudioBuffer out = buf;
    out.sample_rate = to_rate;
    return out;
  }
  const uint64_t g = std::gcd<uint64_t>(buf.sample_rate, to_rate);
  const uint64_t L = to_rate / g;    // upsample factor
  const uint64_t M = buf.sample_rate / g;  // downsample factor

  const double beta = 8.6;
  const double zero_crossings = 32.0;
  const double fc = 0.5 * std::min(1.0, static_cast<double>(to_rate) / buf.sample_rate);
  const double half_width = zero_crossings / (2.0 * fc);
  const double inv_i0_beta = 1.0 / detail_resample::kaiser_i0(beta);

  const std::size_t in_len = buf.samples.size();
  const std::size_t out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(in_len) * to_rate / buf.sample_rate));

  // Output n sits at source time n*M/L; the tap set depends only on the
  // fractional phase (n*M mod L)/L, so taps are tabulated per phase when the
  // table is small and evaluated directly (identical values) otherwise.
  struct Phase {
    std::vector<double> taps;
    std::ptrdiff_t left;  // source index offset of taps[0] relative to floor(t)
    double inv_sum;
  };
  auto build_phase = [&](double frac) {
    Phase ph;
    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(std::ceil(frac - half_width));
    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(std::floor(frac + half_width));
    ph.left = lo;
    ph.taps.reserve(static_cast<std::size_t>(hi - lo + 1));
    double sum = 0.0;
    for (std::ptrdiff_t m = lo; m <= hi; ++m) {
      const double tap =
          detail_resample::sinc_tap(frac - static_cast<double>(m), fc, half_width, inv_i0_beta, beta);
      ph.taps.push_back(tap);
      sum += tap;
    }
    ph.inv_sum = sum != 0.0 ? 1.0 / sum : 0.0;
    return ph;
  };

  std::vector<Phase> table;
  const bool tabulate = L <= 1024;
  if (tabulate) {
    table.reserve(static_cast<std::size_t>(L));
    // Output n reads phase (n*M mod L)/L, so slot p holds the taps for p/L.
    for (uint64_t p = 0; p < L; ++p) {
      table.push_back(build_phase(static_cast<double>(p) / static_cast<double>(L)));
    }
  }

  AudioBuffer out;
  out.sample_rate = to_rate;
  out.samples.resize(out_len);
  Phase scratch;
  for (std::size_t n = 0; n < out_len; ++n) {
    const uint64_t num = static_cast<uint64_t>(n) * M;
    const std::size_t base = static_cast<std::size_t>(num / L);
    if (!tabulate) {
      scratch = build_phase(static_cast<double>(num % L) / static_cast<double>(L));
    }
    const Phase& ph = tabulate ? table[static_cast<std::size_t>(num % L)] : scratch;
    double acc = 0.0;
    for (std::size_t k = 0; k < ph.taps.size(); ++k) {
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(base) + ph.left +
                                 static_cast<std::ptrdiff_t>(k);
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(in_len)) continue;
      acc += ph.taps[k] * buf.samples[static_cast<std::size_t>(idx)];
    }
    out.samples[n] = std::clamp(acc * ph.inv_sum, -1.0, 1.0);
  }
  return out;
}

}  // namespace mayektts
