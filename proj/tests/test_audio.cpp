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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mayektts/audio.hpp"
#include "mayektts/fft.hpp"
#include "mayektts/rng.hpp"
#include "test_util.hpp"

using namespace mayektts;

namespace {

const double kPi = 3.14159265358979323846;

AudioBuffer sine(double amp, double freq, uint32_t rate, std::size_t n) {
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.samples[i] = amp * std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate);
  }
  return b;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out.good());
}

void put16(std::string& s, uint16_t v) {
  s.push_back(char(v & 0xFF));
  s.push_back(char(v >> 8 & 0xFF));
}
void put32(std::string& s, uint32_t v) {
  put16(s, static_cast<uint16_t>(v & 0xFFFF));
  put16(s, static_cast<uint16_t>(v >> 16));
}

// Hand-built RIFF container so header fields can be set arbitrarily.
std::string wav_bytes(uint16_t format, uint16_t channels, uint32_t rate, uint16_t bits,
                      const std::vector<int16_t>& interleaved, const std::string& extra_chunk = "",
                      bool data_first = false) {
  std::string fmt;
  put16(fmt, format);
  put16(fmt, channels);
  put32(fmt, rate);
  put32(fmt, rate * channels * (bits / 8));
  put16(fmt, static_cast<uint16_t>(channels * (bits / 8)));
  put16(fmt, bits);

  std::string data;
  for (const int16_t v : interleaved) put16(data, static_cast<uint16_t>(v));

  std::string body;
  auto chunk = [&](const char* id, const std::string& payload) {
    body += id;
    put32(body, static_cast<uint32_t>(payload.size()));
    body += payload;
    if (payload.size() & 1) body.push_back('\0');
  };
  if (!extra_chunk.empty()) chunk("LIST", extra_chunk);
  if (data_first) {
    chunk("data", data);
    chunk("fmt ", fmt);
  } else {
    chunk("fmt ", fmt);
    chunk("data", data);
  }

  std::string out = "RIFF";
  put32(out, static_cast<uint32_t>(4 + body.size()));
  out += "WAVE";
  out += body;
  return out;
}

// Mirror of the trim contract, written as a direct scan for the oracle.
struct TrimSpan {
  bool all_silent;
  std::size_t begin, end;
};

TrimSpan trim_oracle(const AudioBuffer& buf, const TrimConfig& cfg) {
  auto ms = [&](uint32_t v) {
    return static_cast<std::size_t>((uint64_t(buf.sample_rate) * v + 500) / 1000);
  };
  const std::size_t frame = ms(cfg.frame_ms);
  const std::size_t hop = ms(cfg.hop_ms);
  std::size_t pad = ms(cfg.keep_pad_ms);
  pad = (pad + hop - 1) / hop * hop;
  const double thresh = std::pow(10.0, cfg.threshold_db / 20.0);

  std::ptrdiff_t first = -1, last = -1;
  for (std::size_t s = 0; s + frame <= buf.samples.size(); s += hop) {
    double acc = 0.0;
    for (std::size_t i = 0; i < frame; ++i) acc += buf.samples[s + i] * buf.samples[s + i];
    if (std::sqrt(acc / static_cast<double>(frame)) >= thresh) {
      if (first < 0) first = static_cast<std::ptrdiff_t>(s);
      last = static_cast<std::ptrdiff_t>(s);
    }
  }
  if (first < 0) return {true, 0, 0};
  const std::size_t begin =
      static_cast<std::size_t>(first) > pad ? static_cast<std::size_t>(first) - pad : 0;
  const std::size_t end = std::min(buf.samples.size(), static_cast<std::size_t>(last) + hop + pad);
  return {false, begin, end};
}

double rms_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Peak frequency by zero-padded FFT of a Hann-windowed interior slice, with
// parabolic refinement on the log magnitude.
double peak_freq(const AudioBuffer& buf, std::size_t skip, std::size_t window) {
  REQUIRE(buf.samples.size() >= skip + window);
  const std::size_t padded = 65536;
  std::vector<std::complex<double>> a(padded);
  for (std::size_t i = 0; i < window; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * i / static_cast<double>(window - 1));
    a[i] = {buf.samples[skip + i] * w, 0.0};
  }
  fft_inplace(a, false);
  std::size_t k = 1;
  double best = 0.0;
  for (std::size_t i = 1; i < padded / 2; ++i) {
    if (std::abs(a[i]) > best) {
      best = std::abs(a[i]);
      k = i;
    }
  }
  const double la = std::log(std::abs(a[k - 1]));
  const double lb = std::log(std::abs(a[k]));
  const double lc = std::log(std::abs(a[k + 1]));
  const double shift = 0.5 * (la - lc) / (la - 2.0 * lb + lc);
  return (static_cast<double>(k) + shift) * buf.sample_rate / static_cast<double>(padded);
}

// SNR against a least-squares sinusoid fit at the given frequency.
double fit_snr_db(const AudioBuffer& buf, double freq, std::size_t skip) {
  const std::size_t n = buf.samples.size() - 2 * skip;
  double scc = 0, scs = 0, sss = 0, scy = 0, ssy = 0;
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(skip + i) / buf.sample_rate;
    c[i] = std::cos(2.0 * kPi * freq * t);
    s[i] = std::sin(2.0 * kPi * freq * t);
    const double y = buf.samples[skip + i];
    scc += c[i] * c[i];
    scs += c[i] * s[i];
    sss += s[i] * s[i];
    scy += c[i] * y;
    ssy += s[i] * y;
  }
  const double det = scc * sss - scs * scs;
  const double a = (scy * sss - ssy * scs) / det;
  const double b = (ssy * scc - scy * scs) / det;
  double psig = 0, pres = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = a * c[i] + b * s[i];
    const double res = buf.samples[skip + i] - fit;
    psig += fit * fit;
    pres += res * res;
  }
  return 10.0 * std::log10(psig / pres);
}

}  // namespace

TEST_CASE("wav io round trips through quantization") {
  const auto dir = testutil::scratch_dir("audio");
  const auto path = testutil::join(dir, "rt.wav");

  AudioBuffer in;
  in.sample_rate = 22050;
  in.samples = {0.5, -0.25, 1.0, -1.5, 1e-6, -16384.5 / 32768.0, 0.3330078125};
  write_wav(path, in);
  const auto out = read_wav(path);
  REQUIRE(out.sample_rate == 22050);
  REQUIRE(out.samples.size() == in.samples.size());
  const std::vector<double> expected = {
      16384.0 / 32768.0, -8192.0 / 32768.0, 32767.0 / 32768.0, -1.0,
      0.0,               -16385.0 / 32768.0, 10912.0 / 32768.0,
  };
  REQUIRE(out.samples == expected);

  // Re-writing decoded samples is byte-stable.
  const auto path2 = testutil::join(dir, "rt2.wav");
  write_wav(path2, out);
  REQUIRE(slurp(path2) == slurp(path));
}

TEST_CASE("wav reader averages stereo and walks odd chunks") {
  const auto dir = testutil::scratch_dir("audio");
  SECTION("stereo to mono") {
    const auto p = testutil::join(dir, "st.wav");
    spit(p, wav_bytes(1, 2, 16000, 16, {1000, 2000, -32768, -32768}));
    const auto b = read_wav(p);
    REQUIRE(b.sample_rate == 16000);
    REQUIRE(b.samples.size() == 2);
    REQUIRE(b.samples[0] == (1000.0 / 32768.0 + 2000.0 / 32768.0) / 2.0);
    REQUIRE(b.samples[1] == -1.0);
  }
  SECTION("odd-length chunk before fmt is skipped with its pad byte") {
    const auto p = testutil::join(dir, "odd.wav");
    spit(p, wav_bytes(1, 1, 8000, 16, {123, -456}, "abc"));
    const auto b = read_wav(p);
    REQUIRE(b.samples.size() == 2);
    REQUIRE(b.samples[0] == 123.0 / 32768.0);
  }
  SECTION("data chunk before fmt chunk") {
    const auto p = testutil::join(dir, "order.wav");
    spit(p, wav_bytes(1, 1, 8000, 16, {77}, "", true));
    REQUIRE(read_wav(p).samples.size() == 1);
  }
}

TEST_CASE("wav reader rejects bad files with specific codes") {
  const auto dir = testutil::scratch_dir("audio");
  auto code_of = [&](const std::string& name, const std::string& bytes) {
    const auto p = testutil::join(dir, name);
    spit(p, bytes);
    try {
      read_wav(p);
      FAIL("expected a throw");
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };

  REQUIRE(code_of("empty.wav", "") == ErrorCode::CorruptHeader);
  auto bad_magic = wav_bytes(1, 1, 8000, 16, {1});
  bad_magic[0] = 'X';
  REQUIRE(code_of("magic.wav", bad_magic) == ErrorCode::CorruptHeader);
  auto bad_wave = wav_bytes(1, 1, 8000, 16, {1});
  bad_wave[8] = 'X';
  REQUIRE(code_of("wave.wav", bad_wave) == ErrorCode::CorruptHeader);
  REQUIRE(code_of("rate0.wav", wav_bytes(1, 1, 0, 16, {1})) == ErrorCode::CorruptHeader);
  auto truncated = wav_bytes(1, 1, 8000, 16, {1, 2, 3, 4});
  truncated.resize(truncated.size() - 5);
  REQUIRE(code_of("trunc.wav", truncated) == ErrorCode::CorruptHeader);
  REQUIRE(code_of("nodata.wav", std::string("RIFF\x04\0\0\0WAVE", 12)) == ErrorCode::CorruptHeader);
  REQUIRE(code_of("float.wav", wav_bytes(3, 1, 8000, 16, {1})) == ErrorCode::UnsupportedFormat);
  REQUIRE(code_of("bits8.wav", wav_bytes(1, 1, 8000, 8, {1})) == ErrorCode::UnsupportedFormat);
  REQUIRE(code_of("chan3.wav", wav_bytes(1, 3, 8000, 16, {1, 2, 3})) ==
          ErrorCode::UnsupportedFormat);

  try {
    read_wav(testutil::join(dir, "does-not-exist.wav"));
    FAIL("expected a throw");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::IoError);
  }

  AudioBuffer b;
  b.samples = {0.0};
  b.sample_rate = 0;
  REQUIRE_THROWS_AS(write_wav(testutil::join(dir, "r0.wav"), b), Error);
}

TEST_CASE("trim matches a direct scan of the gate contract") {
  TrimConfig cfg;
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    AudioBuffer buf;
    buf.sample_rate = 16000;
    buf.samples.resize(2000 + rng.below(8000));
    for (auto& x : buf.samples) x = 1e-4 * (2.0 * rng.uniform() - 1.0);
    const std::size_t n_seg = rng.below(3);
    for (std::size_t k = 0; k < n_seg; ++k) {
      const std::size_t len = 200 + rng.below(1200);
      const std::size_t at = rng.below(buf.samples.size() - len);
      const double amp = 0.2 + 0.7 * rng.uniform();
      for (std::size_t i = 0; i < len; ++i) buf.samples[at + i] = amp;
    }

    const auto want = trim_oracle(buf, cfg);
    const auto got = trim_silence(buf, cfg);
    REQUIRE(got.all_silent == want.all_silent);
    if (want.all_silent) {
      REQUIRE(got.audio.samples == buf.samples);
      continue;
    }
    const std::vector<double> expected(buf.samples.begin() + static_cast<std::ptrdiff_t>(want.begin),
                                       buf.samples.begin() + static_cast<std::ptrdiff_t>(want.end));
    REQUIRE(got.audio.samples == expected);

    const auto again = trim_silence(got.audio, cfg);
    REQUIRE_FALSE(again.all_silent);
    REQUIRE(again.audio.samples == got.audio.samples);
  }
}

TEST_CASE("trim recovers a burst inside silence") {
  AudioBuffer buf;
  buf.sample_rate = 22050;
  const std::size_t half_s = 11025;
  const std::size_t burst = 4410;  // 0.2 s
  buf.samples.assign(2 * half_s + burst, 0.0);
  for (std::size_t i = 0; i < burst; ++i) buf.samples[half_s + i] = 0.5;

  TrimConfig cfg;
  const auto r = trim_silence(buf, cfg);
  REQUIRE_FALSE(r.all_silent);

  // Kept span must contain the burst: its peak count survives.
  std::size_t kept_loud = 0;
  for (const double x : r.audio.samples) kept_loud += x == 0.5 ? 1 : 0;
  REQUIRE(kept_loud == burst);

  // frame 441, hop 221, pad 1105 samples at 22050 Hz
  const double slack = (441.0 + 221.0 + 2.0 * 1105.0) / 22050.0;
  REQUIRE(std::fabs(r.audio.duration_s() - 0.2) <= slack);

  const auto again = trim_silence(r.audio, cfg);
  REQUIRE(again.audio.samples == r.audio.samples);
}

TEST_CASE("trim flags silence and rejects bad configs") {
  AudioBuffer quiet;
  quiet.sample_rate = 22050;
  quiet.samples.assign(22050, 0.0);
  REQUIRE(trim_silence(quiet, {}).all_silent);

  AudioBuffer tiny;
  tiny.sample_rate = 22050;
  tiny.samples.assign(100, 0.9);  // shorter than one frame
  REQUIRE(trim_silence(tiny, {}).all_silent);

  AudioBuffer empty;
  empty.sample_rate = 22050;
  REQUIRE_THROWS_AS(trim_silence(empty, {}), Error);

  AudioBuffer ok = quiet;
  TrimConfig bad1;
  bad1.hop_ms = 0;
  REQUIRE_THROWS_AS(trim_silence(ok, bad1), Error);
  TrimConfig bad2;
  bad2.frame_ms = 5;
  bad2.hop_ms = 10;
  REQUIRE_THROWS_AS(trim_silence(ok, bad2), Error);
}

TEST_CASE("loudness normalization hits the target rms") {
  SECTION("sine to -20 dBFS") {
    const auto in = sine(0.4, 440.0, 22050, 11025);
    const auto r = normalize_loudness(in, -20.0);
    REQUIRE_FALSE(r.peak_limited);
    REQUIRE(std::fabs(rms_of(r.audio.samples) - 0.1) < 1e-12);
    REQUIRE(r.audio.sample_rate == 22050);
  }
  SECTION("exact gain on a constant signal") {
    AudioBuffer in;
    in.sample_rate = 16000;
    in.samples.assign(100, 0.5);
    const auto r = normalize_loudness(in, 0.0);
    REQUIRE(r.gain == 2.0);
    REQUIRE_FALSE(r.peak_limited);
    REQUIRE(r.audio.samples[0] == 1.0);
  }
  SECTION("peak limiting caps the gain") {
    AudioBuffer in;
    in.sample_rate = 16000;
    in.samples.assign(96, 0.25);
    in.samples.push_back(0.5);
    const auto r = normalize_loudness(in, 0.0);
    REQUIRE(r.peak_limited);
    REQUIRE(r.gain == 2.0);
    double peak = 0.0;
    for (const double x : r.audio.samples) peak = std::max(peak, std::fabs(x));
    REQUIRE(peak == 1.0);
  }
  SECTION("silent and empty inputs are errors") {
    AudioBuffer z;
    z.sample_rate = 22050;
    z.samples.assign(100, 0.0);
    try {
      normalize_loudness(z);
      FAIL("expected a throw");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::SilentInput);
    }
    AudioBuffer e;
    e.sample_rate = 22050;
    REQUIRE_THROWS_AS(normalize_loudness(e), Error);
  }
}

TEST_CASE("resampling preserves frequency and stays clean") {
  SECTION("matching rates copy bit for bit") {
    const auto in = sine(0.5, 440.0, 22050, 4410);
    const auto out = resample(in, 22050);
    REQUIRE(out.samples == in.samples);
  }
  SECTION("output length is the rounded rational length") {
    AudioBuffer in;
    in.sample_rate = 44100;
    in.samples.assign(1001, 0.0);
    REQUIRE(resample(in, 22050).samples.size() == 501);
    AudioBuffer in2;
    in2.sample_rate = 22050;
    in2.samples.assign(26460, 0.0);
    REQUIRE(resample(in2, 16000).samples.size() == 19200);
  }
  SECTION("dc passes through exactly in the interior") {
    AudioBuffer in;
    in.sample_rate = 16000;
    in.samples.assign(16000, 0.25);
    for (const uint32_t to : {22050u, 8000u}) {
      const auto out = resample(in, to);
      double worst = 0.0;
      for (std::size_t i = 200; i + 200 < out.samples.size(); ++i) {
        worst = std::max(worst, std::fabs(out.samples[i] - 0.25));
      }
      REQUIRE(worst < 1e-9);
    }
  }
  SECTION("440 Hz survives down- and up-sampling") {
    const auto in = sine(0.5, 440.0, 22050, 22050);
    for (const uint32_t to : {16000u, 44100u}) {
      const auto out = resample(in, to);
      REQUIRE(out.sample_rate == to);
      const double f = peak_freq(out, 200, 8192);
      REQUIRE(std::fabs(f - 440.0) < 1.0);
      REQUIRE(fit_snr_db(out, 440.0, 200) > 40.0);
    }
  }
  SECTION("zero target rate is rejected") {
    const auto in = sine(0.5, 440.0, 22050, 100);
    try {
      resample(in, 0);
      FAIL("expected a throw");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::BadConfig);
    }
  }
}
