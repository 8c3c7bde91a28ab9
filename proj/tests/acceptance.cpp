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

// Release gate: ten numbered end-to-end checks, one pass/fail line each.
// Exits nonzero if any check fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixture_corpus.hpp"
#include "gradcheck_harness.hpp"
#include "kernel_oracles.hpp"
#include "mayektts/mayektts.hpp"
#include "test_util.hpp"

using namespace mayektts;

namespace {

int g_failures = 0;

struct CheckFailure {
  std::string what;
};

void check(bool cond, const std::string& what) {
  if (!cond) throw CheckFailure{what};
}

void run_criterion(int n, const std::string& label, const std::function<void()>& fn) {
  try {
    fn();
    std::printf("PASS criterion %d: %s\n", n, label.c_str());
  } catch (const CheckFailure& f) {
    ++g_failures;
    std::printf("FAIL criterion %d: %s (%s)\n", n, label.c_str(), f.what.c_str());
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("FAIL criterion %d: %s (unexpected: %s)\n", n, label.c_str(), e.what());
  }
  std::fflush(stdout);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), "cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args, std::string* stdout_text) {
  const std::string dir = testutil::scratch_dir("accept_corpus");
  const std::string out = testutil::join(dir, "cli.out");
  const std::string cmd =
      std::string(CLI_PATH) + " " + args + " >'" + out + "' 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  check(rc != -1 && WIFEXITED(rc), "cli did not exit normally");
  if (stdout_text != nullptr) *stdout_text = slurp(out);
  return WEXITSTATUS(rc);
}

AudioBuffer sine(double amp, double freq, uint32_t rate, std::size_t n) {
  AudioBuffer buf;
  buf.sample_rate = rate;
  buf.samples.resize(n);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < n; ++i) {
    buf.samples[i] = amp * std::sin(2.0 * pi * freq * static_cast<double>(i) / rate);
  }
  return buf;
}

double rms_of(const std::vector<double>& x) {
  double acc = 0.0;
  for (const double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

// Dominant frequency of a windowed interior slice, refined by parabolic
// interpolation on the log magnitude of a zero-padded FFT.
double peak_freq(const AudioBuffer& buf, std::size_t skip, std::size_t window) {
  const std::size_t n_fft = 65536;
  std::vector<std::complex<double>> a(n_fft, 0.0);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < window; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / (window - 1));
    a[i] = buf.samples[skip + i] * w;
  }
  fft_inplace(a, false);
  std::size_t best = 1;
  for (std::size_t k = 1; k + 1 < n_fft / 2; ++k) {
    if (std::abs(a[k]) > std::abs(a[best])) best = k;
  }
  const double lm = std::log(std::abs(a[best - 1]) + 1e-300);
  const double lc = std::log(std::abs(a[best]) + 1e-300);
  const double lp = std::log(std::abs(a[best + 1]) + 1e-300);
  const double denom = lm - 2.0 * lc + lp;
  const double delta = denom == 0.0 ? 0.0 : 0.5 * (lm - lp) / denom;
  return (static_cast<double>(best) + delta) * buf.sample_rate / static_cast<double>(n_fft);
}

// Signal-to-residual ratio against the best least-squares sinusoid at freq,
// measured over the interior (skipping transition bands at both ends).
double fit_snr_db(const AudioBuffer& buf, double freq, std::size_t skip) {
  const std::size_t n = buf.samples.size() - 2 * skip;
  const double pi = 3.14159265358979323846;
  double cc = 0.0, cs = 0.0, ss = 0.0, yc = 0.0, ys = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * freq * static_cast<double>(skip + i) / buf.sample_rate;
    const double c = std::cos(t), s = std::sin(t), y = buf.samples[skip + i];
    cc += c * c;
    cs += c * s;
    ss += s * s;
    yc += y * c;
    ys += y * s;
  }
  const double det = cc * ss - cs * cs;
  const double a = (yc * ss - ys * cs) / det;
  const double b = (ys * cc - yc * cs) / det;
  double psig = 0.0, pres = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * freq * static_cast<double>(skip + i) / buf.sample_rate;
    const double fit = a * std::cos(t) + b * std::sin(t);
    psig += fit * fit;
    pres += (buf.samples[skip + i] - fit) * (buf.samples[skip + i] - fit);
  }
  return 10.0 * std::log10(psig / (pres + 1e-300));
}

const ClassificationTable& classes() {
  static const ClassificationTable t =
      ClassificationTable::load(testutil::join(testutil::data_dir(), "mayek_classes.tsv"));
  return t;
}

const NormRules& norm_rules() {
  static const NormRules r =
      NormRules::load(testutil::join(testutil::data_dir(), "norm_rules.tsv"));
  return r;
}

const MappingTable& mapping() {
  static const MappingTable t =
      MappingTable::load(testutil::join(testutil::data_dir(), "mayek_arpabet.tsv"));
  return t;
}

std::string join_phones(const std::vector<std::string>& phones) {
  std::string out;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (i != 0) out += ' ';
    out += phones[i];
  }
  return out;
}

void criterion_gradients() {
  const auto entries = gradharness::run_all(20, 90210);
  check(!entries.empty(), "no gradcheck entries");
  const double worst = gradharness::max_rel_error(entries);
  check(worst < 1e-5, "worst rel_error " + std::to_string(worst));
}

void criterion_kernel_oracles() {
  const double diff = oracles::kernel_equivalence_max_diff(100, 424242);
  check(diff < 1e-12, "max deviation " + std::to_string(diff));
}

void criterion_lstm_law() {
  const std::size_t hidden = 6;
  nn::LstmParams p;
  for (Tensor* t : {&p.w_f, &p.w_i, &p.w_o, &p.w_c}) *t = Tensor({hidden, 4});
  for (Tensor* t : {&p.u_f, &p.u_i, &p.u_o, &p.u_c}) *t = Tensor({hidden, hidden});
  for (Tensor* t : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) *t = Tensor({hidden});
  Tensor x({4});
  x[0] = -1.0;
  x[1] = 0.5;
  x[2] = 3.0;
  x[3] = -0.25;
  nn::LstmState state;
  state.h = Tensor({hidden});
  state.c = Tensor({hidden});
  for (std::size_t j = 0; j < hidden; ++j) state.c[j] = 0.3 * static_cast<double>(j) - 0.8;
  for (int step = 0; step < 4; ++step) {
    const nn::LstmState next = nn::lstm_cell(x, state, p);
    for (std::size_t j = 0; j < hidden; ++j) {
      check(next.c[j] == 0.5 * state.c[j], "cell update is not exactly half");
      check(next.h[j] == 0.5 * std::tanh(next.c[j]), "hidden update is not half of tanh");
    }
    state = next;
  }
}

void criterion_embedding() {
  const std::size_t vocab = 55, dim = 512;
  Rng rng(3);
  const Tensor table = nn::embedding_init(vocab, dim, rng);
  const double bound = nn::glorot_bound(vocab, dim);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    check(std::abs(table[i]) <= bound, "value outside the init bound");
    sum += table[i];
    sq += table[i] * table[i];
  }
  const double n = static_cast<double>(table.size());
  const double mean = sum / n;
  const double got_std = std::sqrt(sq / n - mean * mean);
  const double want_std = std::sqrt(2.0 / static_cast<double>(vocab + dim));
  check(std::abs(got_std - want_std) < 0.05 * want_std,
        "std " + std::to_string(got_std) + " vs " + std::to_string(want_std));
}

void criterion_lr_schedule() {
  nn::LrSchedule s;
  check(nn::lr_at(s, 0) == 1e-3, "rate at 0 is not the initial value");
  check(nn::lr_at(s, 5000) == 1e-3 * std::exp(-1.0), "rate at 5000 is not initial/e");
  check(nn::lr_at(s, 30000) == 1e-5, "rate at 30000 is not the floor");
  for (uint64_t t : {0ull, 1ull, 50ull, 500ull, 2500ull, 5000ull, 9000ull, 15000ull,
                     25000ull, 100000ull}) {
    const double want =
        std::max(s.floor, s.initial * std::exp(-static_cast<double>(t) / s.decay));
    check(std::abs(nn::lr_at(s, t) - want) <= 1e-12 * want,
          "rate diverges from the closed form at t=" + std::to_string(t));
  }
}

void criterion_forward_contract() {
  nn::Dims d;
  d.vocab = mapping().inventory.size();
  check(d.vocab == 38, "inventory size changed");
  const nn::Tacotron2Params params = nn::init_params(d, 42);
  const std::size_t max_frames = 30;
  for (std::size_t len : {std::size_t{1}, std::size_t{5}, std::size_t{20}}) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < len; ++i) ids.push_back(static_cast<int>(2 + i % 30));
    Rng rng(7);
    const nn::ForwardResult r = nn::tacotron_forward(params, ids, max_frames, rng);
    const std::size_t frames = r.stop.size();
    check(frames >= 1 && frames <= max_frames, "frame count out of range");
    check(r.mel.shape() == std::vector<std::size_t>{frames, d.n_mels}, "mel shape");
    check(r.mel_post.shape() == std::vector<std::size_t>{frames, d.n_mels}, "mel_post shape");
    check(r.alignments.shape() == std::vector<std::size_t>{frames, len}, "alignment shape");
    for (std::size_t t = 0; t < frames; ++t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        check(r.alignments.at2(t, i) >= 0.0, "negative attention weight");
        sum += r.alignments.at2(t, i);
      }
      check(std::abs(sum - 1.0) < 1e-9, "attention row does not sum to 1");
    }
  }
  nn::Tacotron2Params forced = params;
  forced.stop_w.fill(0.0);
  forced.stop_b[0] = 10.0;
  Rng rng(7);
  const nn::ForwardResult r = nn::tacotron_forward(forced, {2, 3, 4}, max_frames, rng);
  check(r.stop.size() == 1, "saturated stop gate did not halt after one frame");
}

void criterion_spectral() {
  const StftConfig cfg;
  Rng rng(2468);
  AudioBuffer noise;
  noise.sample_rate = 22050;
  noise.samples.resize(22050);
  for (double& s : noise.samples) s = rng.uniform(-0.8, 0.8);
  const ComplexSpec spec = stft_complex(noise, cfg);
  const std::vector<double> back = istft(spec, cfg, noise.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < noise.samples.size(); ++i) {
    worst = std::max(worst, std::abs(back[i] - noise.samples[i]));
  }
  check(worst < 1e-6, "analysis-synthesis deviation " + std::to_string(worst));

  const AudioBuffer tone = sine(0.5, 440.0, 22050, 6615);
  const Tensor mag = stft(tone, cfg);
  const GriffinLimResult gl = griffin_lim(mag, cfg, 60, 1234, 22050);
  check(gl.errors.size() == 61, "one error value per iteration plus the start");
  for (std::size_t i = 1; i < gl.errors.size(); ++i) {
    check(gl.errors[i] <= gl.errors[i - 1] + 1e-10, "spectral error increased");
  }
  check(gl.errors.back() < 0.1, "final spectral error " + std::to_string(gl.errors.back()));
}

void criterion_audio_tools() {
  const std::string dir = testutil::scratch_dir("accept_audio");

  AudioBuffer quantized;
  quantized.sample_rate = 22050;
  Rng rng(31337);
  for (int i = 0; i < 4096; ++i) {
    const double v = rng.uniform(-1.0, 1.0);
    const long long q = std::min(std::llround(v * 32768.0), 32767ll);
    quantized.samples.push_back(static_cast<double>(q) / 32768.0);
  }
  const std::string wav_path = testutil::join(dir, "roundtrip.wav");
  write_wav(wav_path, quantized);
  const AudioBuffer reread = read_wav(wav_path);
  check(reread.sample_rate == quantized.sample_rate, "sample rate changed");
  check(reread.samples == quantized.samples, "quantized samples changed");
  const std::string wav_path2 = testutil::join(dir, "roundtrip2.wav");
  write_wav(wav_path2, reread);
  check(slurp(wav_path) == slurp(wav_path2), "rewritten file differs");

  AudioBuffer burst;
  burst.sample_rate = 22050;
  burst.samples.assign(11025, 0.0);
  const AudioBuffer mid = sine(0.5, 440.0, 22050, 4410);
  burst.samples.insert(burst.samples.end(), mid.samples.begin(), mid.samples.end());
  burst.samples.insert(burst.samples.end(), 11025, 0.0);
  const TrimResult trimmed = trim_silence(burst, TrimConfig{});
  check(!trimmed.all_silent, "burst flagged silent");
  const double bound = (441.0 + 221.0 + 2.0 * 1105.0) / 22050.0;
  check(std::abs(trimmed.audio.duration_s() - 0.2) <= bound, "trimmed span off target");
  const TrimResult again = trim_silence(trimmed.audio, TrimConfig{});
  check(again.audio.samples == trimmed.audio.samples, "trim is not idempotent");

  const LoudnessResult leveled = normalize_loudness(sine(0.4, 440.0, 22050, 22050), -20.0);
  const double target = std::pow(10.0, -20.0 / 20.0);
  check(std::abs(rms_of(leveled.audio.samples) - target) <= 1e-6 * target,
        "rms misses -20 dbfs");

  const AudioBuffer src = sine(0.5, 440.0, 22050, 22050);
  for (uint32_t to : {16000u, 44100u}) {
    const AudioBuffer out = resample(src, to);
    const double f = peak_freq(out, 200, 8192);
    check(std::abs(f - 440.0) <= 1.0,
          "peak at " + std::to_string(f) + " hz after resampling to " + std::to_string(to));
    const double snr = fit_snr_db(out, 440.0, 200);
    check(snr > 40.0, "snr " + std::to_string(snr) + " db at " + std::to_string(to));
  }
}

void criterion_corpus() {
  Manifest big;
  for (int i = 0; i < 818; ++i) {
    ManifestEntry e;
    char id[16];
    std::snprintf(id, sizeof id, "u%05d", i);
    e.id = id;
    e.wav_path = e.id + std::string(".wav");
    e.raw = "ꯀ";
    e.normalized = "ꯀ";
    e.phonemes = "K AH";
    e.duration_s = 1.0;
    big.entries.push_back(std::move(e));
  }
  SplitSpec spec;
  spec.seed = 11;
  const CorpusSplit split = split_corpus(big, spec);
  check(split.train.size() == 654, "train size " + std::to_string(split.train.size()));
  check(split.val.size() == 81, "val size " + std::to_string(split.val.size()));
  check(split.test.size() == 83, "test size " + std::to_string(split.test.size()));
  std::set<std::string> seen;
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (const auto& e : *part) {
      check(seen.insert(e.id).second, "entry appears in two parts: " + e.id);
    }
  }
  check(seen.size() == 818, "split loses entries");

  const auto paths = fixture::make_corpus(testutil::scratch_dir("accept_corpus"));
  std::string out;
  int status = run_cli("--config '" + testutil::join(testutil::data_dir(), "default.cfg") +
                           "' build-corpus '" + paths.list + "' '" + paths.wav_dir + "' '" +
                           paths.manifest + "'",
                       &out);
  check(status == 0, "build-corpus exited " + std::to_string(status));
  check(out == "entries=6\n", "build-corpus stdout: " + out);
  check(slurp(paths.manifest) == slurp(testutil::join(testutil::golden_dir(), "manifest.psv")),
        "manifest bytes differ from the golden file");

  status = run_cli("--config '" + testutil::join(testutil::data_dir(), "default.cfg") +
                       "' stats '" + paths.manifest + "'",
                   &out);
  check(status == 0, "stats exited " + std::to_string(status));
  check(out == slurp(testutil::join(testutil::golden_dir(), "stats.txt")),
        "stats bytes differ from the golden file");
}

void criterion_text_front_end() {
  const std::string golden =
      slurp(testutil::join(testutil::golden_dir(), "phonemes.txt"));
  std::istringstream lines(golden);
  std::string line;
  std::size_t n_checked = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto sep = line.find('|');
    check(sep != std::string::npos, "golden line lacks a separator");
    const std::string id = line.substr(0, sep);
    const std::string want = line.substr(sep + 1);
    const fixture::Sentence* found = nullptr;
    for (const auto& s : fixture::sentences()) {
      if (id == s.id) found = &s;
    }
    check(found != nullptr, "golden id " + id + " is not a fixture sentence");

    const NormalizedText norm = normalize_text(found->raw, norm_rules());
    check(normalize_text(norm.text, norm_rules()).text == norm.text,
          "normalization is not idempotent on " + id);
    const PhonemeSeq seq = to_phonemes(norm.text, mapping(), classes());
    check(join_phones(seq.phones) == want, "phonemes differ for " + id);

    const std::vector<int> ids = phonemes_to_ids(seq, mapping(), false);
    check(ids_to_phonemes(ids, mapping()) == seq.phones, "id round trip changed " + id);
    const std::vector<int> with_eos = phonemes_to_ids(seq, mapping(), true);
    check(with_eos.size() == ids.size() + 1 && with_eos.back() == kEosId,
          "eos id missing for " + id);
    ++n_checked;
  }
  check(n_checked == fixture::sentences().size(), "golden file does not cover every fixture");

  const auto phones_of = [&](const std::string& text) {
    return to_phonemes(text, mapping(), classes()).phones;
  };
  const std::vector<std::string> plain = phones_of("ꯁꯤ");
  const std::vector<std::string> toned = phones_of("ꯁꯤ꯬");
  check(plain.size() == toned.size(), "tone mark changed the symbol count");
  std::size_t n_diff = 0;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (plain[i] != toned[i]) {
      ++n_diff;
      check(toned[i] == plain[i] + "_F", "tone variant is not a single suffixed symbol");
    }
  }
  check(n_diff == 1, "tone mark rewrote more than one symbol");
}

}  // namespace

int main() {
  run_criterion(1, "analytic gradients match central differences", criterion_gradients);
  run_criterion(2, "kernels agree with naive reference implementations",
                criterion_kernel_oracles);
  run_criterion(3, "zero-parameter lstm follows the exact half-state law", criterion_lstm_law);
  run_criterion(4, "embedding init stays in bounds with the expected spread",
                criterion_embedding);
  run_criterion(5, "learning-rate schedule matches its closed form", criterion_lr_schedule);
  run_criterion(6, "forward pass keeps its shape, attention, and stop contracts",
                criterion_forward_contract);
  run_criterion(7, "analysis-synthesis is exact and griffin-lim converges",
                criterion_spectral);
  run_criterion(8, "wav io, trimming, leveling, and resampling meet their tolerances",
                criterion_audio_tools);
  run_criterion(9, "corpus split and cli pipeline reproduce the goldens", criterion_corpus);
  run_criterion(10, "text front end reproduces golden phonemes and round trips ids",
                criterion_text_front_end);
  if (g_failures != 0) {
    std::printf("%d of 10 criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
