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

// Time-frequency analysis: STFT with centered reflect padding, triangular
// mel filterbank, log-mel spectrograms, least-squares ISTFT, and Griffin-Lim
// phase reconstruction.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "mayektts/audio.hpp"
#include "mayektts/common.hpp"
#include "mayektts/fft.hpp"
#include "mayektts/rng.hpp"
#include "mayektts/tensor.hpp"
#include "mayektts/textio.hpp"

namespace mayektts {

struct StftConfig {
  std::size_t n_fft = 1024;
  std::size_t hop = 256;
  std::size_t win_length = 1024;
  // window: periodic Hann; center: true (reflect padding)

  std::size_t n_bins() const { return n_fft / 2 + 1; }
  void check() const {
    if (n_fft == 0 || (n_fft & (n_fft - 1)) != 0 || hop == 0 || hop > win_length ||
        win_length > n_fft) {
      throw Error(ErrorCode::BadConfig, "stft: need hop <= win_length <= n_fft, n_fft power of 2");
    }
  }
};

struct MelConfig {
  std::size_t n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  uint32_t sample_rate = 22050;
  // scale: natural log of magnitude clamped at 1e-5

  void check() const {
    if (n_mels == 0 || !(fmin < fmax) || fmax > sample_rate / 2.0) {
      throw Error(ErrorCode::BadConfig, "mel: need fmin < fmax <= sample_rate/2");
    }
  }
};

inline constexpr double kLogFloor = 1e-5;

struct MelSpec {
  std::size_t n_frames = 0;
  std::size_t n_mels = 0;
  std::vector<double> data;  // row-major [n_frames x n_mels]

  double& at(std::size_t t, std::size_t m) { return data[t * n_mels + m]; }
  double at(std::size_t t, std::size_t m) const { return data[t * n_mels + m]; }
};

struct ComplexSpec {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::vector<std::complex<double>> data;  // row-major [n_frames x n_bins]

  std::complex<double>& at(std::size_t t, std::size_t k) { return data[t * n_bins + k]; }
  std::complex<double> at(std::size_t t, std::size_t k) const { return data[t * n_bins + k]; }
};

namespace detail_feat {

inline std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * pi * i / n));
  return w;
}

// Window of win_length centered in an n_fft frame, zero-padded.
inline std::vector<double> frame_window(const StftConfig& cfg) {
  std::vector<double> w(cfg.n_fft, 0.0);
  const auto h = hann_periodic(cfg.win_length);
  const std::size_t off = (cfg.n_fft - cfg.win_length) / 2;
  std::copy(h.begin(), h.end(), w.begin() + static_cast<std::ptrdiff_t>(off));
  return w;
}

// Reflection without edge duplication: ..., x[2], x[1], x[0], x[1], x[2], ...
inline double reflect_at(const std::vector<double>& x, std::ptrdiff_t p) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (n == 1) return x[0];
  const std::ptrdiff_t period = 2 * (n - 1);
  std::ptrdiff_t q = p % period;
  if (q < 0) q += period;
  if (q >= n) q = period - q;
  return x[static_cast<std::size_t>(q)];
}

// Number of analysis frames for a centered STFT.
inline std::size_t frame_count(std::size_t len, std::size_t hop) { return 1 + len / hop; }

// Analysis over an already-padded signal: frame f covers [f*hop, f*hop+n_fft).
inline ComplexSpec analyze_padded(const std::vector<double>& padded, const StftConfig& cfg,
                                  std::size_t n_frames, const std::vector<double>& window) {
  ComplexSpec spec;
  spec.n_frames = n_frames;
  spec.n_bins = cfg.n_bins();
  spec.data.resize(n_frames * spec.n_bins);
  std::vector<double> frame(cfg.n_fft);
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (std::size_t i = 0; i < cfg.n_fft; ++i) frame[i] = padded[f * cfg.hop + i] * window[i];
    const auto bins = rfft(frame);
    std::copy(bins.begin(), bins.end(), spec.data.begin() + static_cast<std::ptrdiff_t>(f * spec.n_bins));
  }
  return spec;
}

// Exact least-squares inverse of analyze_padded: per-sample overlap-add of
// windowed frames divided by the summed squared window. Only padded sample 0
// has zero weight (periodic Hann starts at 0); it carries no information and
// is set to 0.
inline std::vector<double> synthesize_padded(const ComplexSpec& spec, const StftConfig& cfg,
                                             const std::vector<double>& window) {
  const std::size_t L = (spec.n_frames - 1) * cfg.hop + cfg.n_fft;
  std::vector<double> num(L, 0.0), den(L, 0.0);
  std::vector<std::complex<double>> half(spec.n_bins);
  for (std::size_t f = 0; f < spec.n_frames; ++f) {
    for (std::size_t k = 0; k < spec.n_bins; ++k) half[k] = spec.at(f, k);
    const auto time = irfft(half, cfg.n_fft);
    for (std::size_t i = 0; i < cfg.n_fft; ++i) {
      num[f * cfg.hop + i] += window[i] * time[i];
      den[f * cfg.hop + i] += window[i] * window[i];
    }
  }
  std::vector<double> out(L);
  for (std::size_t i = 0; i < L; ++i) out[i] = den[i] > 0.0 ? num[i] / den[i] : 0.0;
  return out;
}

inline std::vector<double> pad_center(const std::vector<double>& x, std::size_t pad,
                                      std::size_t total) {
  std::vector<double> padded(total);
  for (std::size_t i = 0; i < total; ++i) {
    padded[i] = reflect_at(x, static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad));
  }
  return padded;
}

}  // namespace detail_feat

inline ComplexSpec stft_complex(const AudioBuffer& buf, const StftConfig& cfg) {
  cfg.check();
  if (buf.samples.empty()) throw Error(ErrorCode::EmptySignal, "stft: empty signal");
  const std::size_t n_frames = detail_feat::frame_count(buf.samples.size(), cfg.hop);
  const std::size_t pad = cfg.n_fft / 2;
  const std::size_t padded_len = (n_frames - 1) * cfg.hop + cfg.n_fft;
  const auto padded = detail_feat::pad_center(buf.samples, pad, padded_len);
  const auto window = detail_feat::frame_window(cfg);
  return detail_feat::analyze_padded(padded, cfg, n_frames, window);
}

// Magnitude spectrogram [n_frames x (n_fft/2+1)].
inline Tensor stft(const AudioBuffer& buf, const StftConfig& cfg) {
  const auto spec = stft_complex(buf, cfg);
  Tensor mag({spec.n_frames, spec.n_bins});
  for (std::size_t i = 0; i < spec.data.size(); ++i) mag[i] = std::abs(spec.data[i]);
  return mag;
}

// Inverts stft_complex, returning out_len samples aligned with the original
// signal (exact for interior samples under the COLA condition).
inline std::vector<double> istft(const ComplexSpec& spec, const StftConfig& cfg,
                                 std::size_t out_len) {
  cfg.check();
  if (spec.n_frames == 0) throw Error(ErrorCode::EmptySignal, "istft: empty spectrogram");
  const auto window = detail_feat::frame_window(cfg);
  const auto padded = detail_feat::synthesize_padded(spec, cfg, window);
  const std::size_t pad = cfg.n_fft / 2;
  if (pad + out_len > padded.size()) {
    throw Error(ErrorCode::ShapeMismatch, "istft: out_len exceeds reconstructable range");
  }
  return {padded.begin() + static_cast<std::ptrdiff_t>(pad),
          padded.begin() + static_cast<std::ptrdiff_t>(pad + out_len)};
}

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular filters with centers uniform on the mel scale; peak height 1.
inline Tensor mel_filterbank(const MelConfig& cfg, std::size_t n_fft) {
  cfg.check();
  const std::size_t n_bins = n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> hz(cfg.n_mels + 2);
  for (std::size_t i = 0; i < hz.size(); ++i) {
    hz[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (cfg.n_mels + 1));
  }
  Tensor fb({cfg.n_mels, n_bins});
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double f0 = hz[m], f1 = hz[m + 1], f2 = hz[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(n_fft);
      const double up = (f - f0) / (f1 - f0);
      const double down = (f2 - f) / (f2 - f1);
      fb.at2(m, k) = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

inline MelSpec mel_spectrogram(const AudioBuffer& buf, const StftConfig& stft_cfg,
                               const MelConfig& mel_cfg) {
  if (buf.sample_rate != mel_cfg.sample_rate) {
    throw Error(ErrorCode::BadConfig, "mel_spectrogram: buffer rate differs from MelConfig rate");
  }
  const Tensor mag = stft(buf, stft_cfg);
  const Tensor fb = mel_filterbank(mel_cfg, stft_cfg.n_fft);
  const std::size_t n_bins = stft_cfg.n_bins();
  MelSpec mel;
  mel.n_frames = mag.dim(0);
  mel.n_mels = mel_cfg.n_mels;
  mel.data.resize(mel.n_frames * mel.n_mels);
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t m = 0; m < mel.n_mels; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) acc += fb.at2(m, k) * mag.at2(t, k);
      mel.at(t, m) = std::log(std::max(kLogFloor, acc));
    }
  }
  return mel;
}

struct GriffinLimResult {
  AudioBuffer audio;
  // errors[k] is the relative spectral-convergence error after k iterations;
  // errors[0] measures the random-phase initialization. Non-increasing.
  std::vector<double> errors;
};

// Alternating projection between the magnitude constraint set and the range
// of the STFT. The iteration runs in the padded domain, where the
// least-squares synthesize/analyze pair makes the error provably monotone.
// Errors use the full-spectrum Frobenius norm (interior bins weighted 2).
inline GriffinLimResult griffin_lim(const Tensor& mag, const StftConfig& cfg,
                                    std::size_t n_iters = 60, uint64_t seed = 0,
                                    uint32_t sample_rate = 22050) {
  cfg.check();
  if (mag.rank() != 2 || mag.dim(1) != cfg.n_bins()) {
    throw Error(ErrorCode::ShapeMismatch, "griffin_lim: magnitude shape mismatch");
  }
  const std::size_t T = mag.dim(0);
  const std::size_t bins = cfg.n_bins();
  const std::size_t nyq = bins - 1;
  const std::size_t out_len = T > 0 ? (T - 1) * cfg.hop : 0;
  if (T == 0) throw Error(ErrorCode::EmptySignal, "griffin_lim: no frames");

  auto bin_weight = [&](std::size_t k) { return k == 0 || k == nyq ? 1.0 : 2.0; };
  double mag_norm_sq = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < bins; ++k) {
      mag_norm_sq += bin_weight(k) * mag.at2(t, k) * mag.at2(t, k);
    }
  }

  GriffinLimResult result;
  result.audio.sample_rate = sample_rate;
  if (mag_norm_sq == 0.0) {
    result.audio.samples.assign(out_len, 0.0);
    result.errors.assign(n_iters + 1, 0.0);
    return result;
  }
  const double mag_norm = std::sqrt(mag_norm_sq);

  const auto window = detail_feat::frame_window(cfg);
  const double pi = 3.14159265358979323846;
  Rng rng(seed);
  ComplexSpec z;
  z.n_frames = T;
  z.n_bins = bins;
  z.data.resize(T * bins);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < bins; ++k) {
      if (k == 0 || k == nyq) {
        z.at(t, k) = mag.at2(t, k);  // DC and Nyquist stay real
      } else {
        const double phi = rng.uniform(-pi, pi);
        z.at(t, k) = std::polar(mag.at2(t, k), phi);
      }
    }
  }

  std::vector<double> x = detail_feat::synthesize_padded(z, cfg, window);
  for (std::size_t iter = 0; iter <= n_iters; ++iter) {
    const auto y = detail_feat::analyze_padded(x, cfg, T, window);
    double err_sq = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t k = 0; k < bins; ++k) {
        const double d = std::abs(y.at(t, k)) - mag.at2(t, k);
        err_sq += bin_weight(k) * d * d;
      }
    }
    result.errors.push_back(std::sqrt(err_sq) / mag_norm);
    if (iter == n_iters) break;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t k = 0; k < bins; ++k) {
        const auto v = y.at(t, k);
        const double a = std::abs(v);
        z.at(t, k) = a > 0.0 ? v * (mag.at2(t, k) / a) : std::complex<double>(mag.at2(t, k), 0.0);
      }
    }
    x = detail_feat::synthesize_padded(z, cfg, window);
  }

  const std::size_t pad = cfg.n_fft / 2;
  result.audio.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(pad),
                              x.begin() + static_cast<std::ptrdiff_t>(pad + out_len));
  return result;
}

inline void save_mels(const std::string& path, const MelSpec& mel) {
  std::string out;
  out += "MELS";
  detail_wav::put_u32(out, static_cast<uint32_t>(mel.n_frames));
  detail_wav::put_u32(out, static_cast<uint32_t>(mel.n_mels));
  for (const double v : mel.data) {
    const float f = static_cast<float>(v);
    uint32_t u;
    std::memcpy(&u, &f, 4);
    detail_wav::put_u32(out, u);
  }
  write_text_file(path, out);
}

inline MelSpec load_mels(const std::string& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, "MELS") != 0) {
    throw Error(ErrorCode::BadMagic, "not a MELS file: " + path);
  }
  if (bytes.size() < 12) throw Error(ErrorCode::TruncatedFile, "truncated MELS header: " + path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  MelSpec mel;
  mel.n_frames = detail_wav::read_u32(p + 4);
  mel.n_mels = detail_wav::read_u32(p + 8);
  const std::size_t count = mel.n_frames * mel.n_mels;
  if (bytes.size() != 12 + 4 * count) {
    throw Error(ErrorCode::TruncatedFile, "MELS payload size mismatch: " + path);
  }
  mel.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const uint32_t u = detail_wav::read_u32(p + 12 + 4 * i);
    float f;
    std::memcpy(&f, &u, 4);
    mel.data[i] = f;
  }
  return mel;
}

// Minimum-norm non-negative estimate of the linear magnitude spectrogram from
// a log-mel spectrogram: per frame, x = F^T (F F^T)^{-1} b, clamped at 0.
inline Tensor mel_to_linear(const MelSpec& mel, const MelConfig& mel_cfg, std::size_t n_fft) {
  const Tensor fb = mel_filterbank(mel_cfg, n_fft);
  const std::size_t M = mel.n_mels;
  const std::size_t K = n_fft / 2 + 1;
  if (fb.dim(0) != M) throw Error(ErrorCode::ShapeMismatch, "mel_to_linear: band count mismatch");

  // Gram matrix with a tiny ridge, factored once (SPD by construction).
  std::vector<double> g(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i; j < M; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += fb.at2(i, k) * fb.at2(j, k);
      g[i * M + j] = g[j * M + i] = acc;
    }
    g[i * M + i] += 1e-10;
  }
  std::vector<double> chol(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = g[i * M + j];
      for (std::size_t k = 0; k < j; ++k) acc -= chol[i * M + k] * chol[j * M + k];
      if (i == j) {
        if (acc <= 0.0) throw Error(ErrorCode::ShapeMismatch, "mel_to_linear: filterbank rank deficient");
        chol[i * M + i] = std::sqrt(acc);
      } else {
        chol[i * M + j] = acc / chol[j * M + j];
      }
    }
  }

  Tensor lin({mel.n_frames, K});
  std::vector<double> y(M), b(M);
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t m = 0; m < M; ++m) b[m] = std::exp(mel.at(t, m));
    for (std::size_t i = 0; i < M; ++i) {
      double acc = b[i];
      for (std::size_t k = 0; k < i; ++k) acc -= chol[i * M + k] * y[k];
      y[i] = acc / chol[i * M + i];
    }
    for (std::size_t i = M; i-- > 0;) {
      double acc = y[i];
      for (std::size_t k = i + 1; k < M; ++k) acc -= chol[k * M + i] * y[k];
      y[i] = acc / chol[i * M + i];
    }
    for (std::size_t k = 0; k < K; ++k) {
      double acc = 0.0;
      for (std::size_t m = 0; m < M; ++m) acc += fb.at2(m, k) * y[m];
      lin.at2(t, k) = std::max(0.0, acc);
    }
  }
  return lin;
}

}  // namespace mayektts
