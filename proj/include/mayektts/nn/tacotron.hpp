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

// The sequence-to-sequence synthesis graph at toy dimensions: embedding,
// convolutional + bidirectional-LSTM encoder, location-sensitive attention,
// two-layer LSTM decoder with prenet, mel and stop projections, and a
// convolutional postnet.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mayektts/common.hpp"
#include "mayektts/nn/layers.hpp"
#include "mayektts/rng.hpp"
#include "mayektts/tensor.hpp"

namespace mayektts::nn {

struct Dims {
  std::size_t vocab = 0;       // phoneme inventory size, includes PAD and EOS
  std::size_t embed = 64;
  std::size_t enc_channels = 64;
  std::size_t enc_kernel = 5;
  std::size_t enc_lstm = 64;   // per direction; encoder output is 2x this
  std::size_t prenet = 64;
  std::size_t attn = 64;
  std::size_t attn_filters = 8;
  std::size_t attn_kernel = 15;
  std::size_t dec = 256;
  std::size_t n_mels = 80;
  std::size_t post_channels = 64;
  std::size_t post_kernel = 5;

  std::size_t memory_dim() const { return 2 * enc_lstm; }
};

struct Tacotron2Params {
  Tensor embedding;                 // [vocab, embed]
  std::vector<Tensor> enc_convs;    // 3 kernels
  LstmParams enc_fwd, enc_bwd;
  PrenetParams prenet;
  AttentionParams attn;
  LstmParams dec_lstm0, dec_lstm1;
  Tensor mel_w, mel_b;              // [n_mels, dec + memory], [n_mels]
  Tensor stop_w, stop_b;            // [1, dec + memory], [1]
  PostnetParams post;
};

// Uniform bound sqrt(3) * sqrt(2 / (fan_in + fan_out)): zero mean with the
// variance-preserving scale 2/(fan_in+fan_out).
inline double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(3.0) * std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
}

inline Tensor embedding_init(std::size_t vocab, std::size_t dim, Rng& rng) {
  const double bound = glorot_bound(vocab, dim);
  Tensor e({vocab, dim});
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = rng.uniform(-bound, bound);
  return e;
}

inline Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids) {
  Tensor out({ids.size(), table.dim(1)});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= table.dim(0)) {
      throw Error(ErrorCode::IndexOutOfRange, "embedding_lookup: id outside vocabulary");
    }
    const auto row = static_cast<std::size_t>(ids[t]);
    for (std::size_t j = 0; j < table.dim(1); ++j) out.at2(t, j) = table.at2(row, j);
  }
  return out;
}

namespace detail_nn {

// Fixed traversal order shared by init, save, and load.
template <typename Fn>
void for_each_tensor(Tacotron2Params& p, Fn&& fn) {
  fn("embedding", p.embedding);
  for (std::size_t i = 0; i < p.enc_convs.size(); ++i) {
    fn("enc.conv" + std::to_string(i) + ".w", p.enc_convs[i]);
  }
  auto lstm = [&](const std::string& prefix, LstmParams& l) {
    fn(prefix + ".w_f", l.w_f);
    fn(prefix + ".w_i", l.w_i);
    fn(prefix + ".w_o", l.w_o);
    fn(prefix + ".w_c", l.w_c);
    fn(prefix + ".u_f", l.u_f);
    fn(prefix + ".u_i", l.u_i);
    fn(prefix + ".u_o", l.u_o);
    fn(prefix + ".u_c", l.u_c);
    fn(prefix + ".b_f", l.b_f);
    fn(prefix + ".b_i", l.b_i);
    fn(prefix + ".b_o", l.b_o);
    fn(prefix + ".b_c", l.b_c);
  };
  lstm("enc.lstm.fwd", p.enc_fwd);
  lstm("enc.lstm.bwd", p.enc_bwd);
  fn("prenet.0.w", p.prenet.w0);
  fn("prenet.0.b", p.prenet.b0);
  fn("prenet.1.w", p.prenet.w1);
  fn("prenet.1.b", p.prenet.b1);
  fn("attn.query.w", p.attn.query_w);
  fn("attn.memory.w", p.attn.memory_w);
  fn("attn.location.w", p.attn.location_w);
  fn("attn.filters", p.attn.filters);
  fn("attn.v", p.attn.v);
  fn("attn.b", p.attn.b);
  lstm("dec.lstm0", p.dec_lstm0);
  lstm("dec.lstm1", p.dec_lstm1);
  fn("mel_proj.w", p.mel_w);
  fn("mel_proj.b", p.mel_b);
  fn("stop_proj.w", p.stop_w);
  fn("stop_proj.b", p.stop_b);
  for (std::size_t i = 0; i < p.post.convs.size(); ++i) {
    fn("post.conv" + std::to_string(i) + ".w", p.post.convs[i]);
  }
}

template <typename Fn>
void for_each_tensor(const Tacotron2Params& p, Fn&& fn) {
  // Single traversal definition; the const view reuses it.
  for_each_tensor(const_cast<Tacotron2Params&>(p), [&](const std::string& name, Tensor& t) {
    fn(name, static_cast<const Tensor&>(t));
  });
}

}  // namespace detail_nn

inline Tacotron2Params make_params(const Dims& d) {
  if (d.vocab == 0) throw Error(ErrorCode::BadConfig, "make_params: vocabulary size is 0");
  Tacotron2Params p;
  p.embedding = Tensor({d.vocab, d.embed});
  p.enc_convs = {Tensor({d.enc_channels, d.embed, d.enc_kernel}),
                 Tensor({d.enc_channels, d.enc_channels, d.enc_kernel}),
                 Tensor({d.enc_channels, d.enc_channels, d.enc_kernel})};
  auto lstm = [](std::size_t in, std::size_t hidden) {
    LstmParams l;
    for (Tensor* w : {&l.w_f, &l.w_i, &l.w_o, &l.w_c}) *w = Tensor({hidden, in});
    for (Tensor* u : {&l.u_f, &l.u_i, &l.u_o, &l.u_c}) *u = Tensor({hidden, hidden});
    for (Tensor* b : {&l.b_f, &l.b_i, &l.b_o, &l.b_c}) *b = Tensor({hidden});
    return l;
  };
  p.enc_fwd = lstm(d.enc_channels, d.enc_lstm);
  p.enc_bwd = lstm(d.enc_channels, d.enc_lstm);
  p.prenet.w0 = Tensor({d.prenet, d.n_mels});
  p.prenet.b0 = Tensor({d.prenet});
  p.prenet.w1 = Tensor({d.prenet, d.prenet});
  p.prenet.b1 = Tensor({d.prenet});
  p.attn.query_w = Tensor({d.attn, d.dec});
  p.attn.memory_w = Tensor({d.attn, d.memory_dim()});
  p.attn.location_w = Tensor({d.attn, d.attn_filters});
  p.attn.filters = Tensor({d.attn_filters, 1, d.attn_kernel});
  p.attn.v = Tensor({d.attn});
  p.attn.b = Tensor({d.attn});
  p.dec_lstm0 = lstm(d.prenet + d.memory_dim(), d.dec);
  p.dec_lstm1 = lstm(d.dec + d.memory_dim(), d.dec);
  p.mel_w = Tensor({d.n_mels, d.dec + d.memory_dim()});
  p.mel_b = Tensor({d.n_mels});
  p.stop_w = Tensor({1, d.dec + d.memory_dim()});
  p.stop_b = Tensor({1});
  p.post.convs = {Tensor({d.post_channels, d.n_mels, d.post_kernel}),
                  Tensor({d.post_channels, d.post_channels, d.post_kernel}),
                  Tensor({d.post_channels, d.post_channels, d.post_kernel}),
                  Tensor({d.post_channels, d.post_channels, d.post_kernel}),
                  Tensor({d.n_mels, d.post_channels, d.post_kernel})};
  return p;
}

// Deterministic initialization. Weight matrices and kernels draw from the
// uniform bound above; biases start at zero; every drawn value is quantized
// through f32 so a save/load round trip through the f32 weight file
// reproduces the parameters bit for bit.
inline Tacotron2Params init_params(const Dims& d, uint64_t seed) {
  Tacotron2Params p = make_params(d);
  Rng rng(seed);
  detail_nn::for_each_tensor(p, [&](const std::string& name, Tensor& t) {
    double bound = 0.0;
    if (t.rank() == 2) {
      bound = glorot_bound(t.dim(1), t.dim(0));
    } else if (t.rank() == 3) {
      bound = glorot_bound(t.dim(1) * t.dim(2), t.dim(0) * t.dim(2));
    } else if (name == "attn.v") {
      bound = glorot_bound(t.dim(0), 1);
    } else {
      return;  // biases stay zero
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = static_cast<double>(static_cast<float>(rng.uniform(-bound, bound)));
    }
  });
  return p;
}

// Memory produced by the encoder for a phoneme id sequence: [L, 2*enc_lstm].
inline Tensor encode(const Tacotron2Params& p, const std::vector<int>& ids) {
  if (ids.empty()) throw Error(ErrorCode::EmptySignal, "encode: empty id sequence");
  const Tensor embedded = embedding_lookup(p.embedding, ids);  // [L, embed]
  const std::size_t L = ids.size();
  Tensor h({embedded.dim(1), L});
  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t c = 0; c < embedded.dim(1); ++c) h.at2(c, t) = embedded.at2(t, c);
  }
  for (const Tensor& w : p.enc_convs) h = relu(conv1d(h, w));
  Tensor seq({L, h.dim(0)});
  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t c = 0; c < h.dim(0); ++c) seq.at2(t, c) = h.at2(c, t);
  }
  return bilstm(seq, p.enc_fwd, p.enc_bwd);
}

struct ForwardResult {
  Tensor mel;         // [T, n_mels] decoder output
  Tensor mel_post;    // [T, n_mels] after postnet residual
  Tensor stop;        // [T] stop probabilities
  Tensor alignments;  // [T, L]
};

// Autoregressive decoding: each step runs prenet on the previous mel frame,
// advances the first LSTM, attends with its output as the query, advances
// the second LSTM on [h0, context], and projects [h1, context] to a mel
// frame and a stop logit. Decoding ends when the stop probability passes 0.5
// or after max_frames. The prenet keeps dropout active, so `rng` is the only
// source of variation between runs.
inline ForwardResult tacotron_forward(const Tacotron2Params& p, const std::vector<int>& ids,
                                      std::size_t max_frames, Rng& rng) {
  if (max_frames == 0) throw Error(ErrorCode::BadConfig, "tacotron_forward: max_frames is 0");
  const Tensor memory = encode(p, ids);  // [L, mem]
  const std::size_t L = memory.dim(0);
  const std::size_t mem_dim = memory.dim(1);
  const std::size_t n_mels = p.mel_w.dim(0);
  const Tensor processed = process_memory(memory, p.attn);

  Tensor alignment({L});
  alignment[0] = 1.0;
  Tensor context({mem_dim});
  for (std::size_t j = 0; j < mem_dim; ++j) context[j] = memory.at2(0, j);
  Tensor prev_mel({n_mels});
  LstmState s0 = zero_state(p.dec_lstm0.hidden());
  LstmState s1 = zero_state(p.dec_lstm1.hidden());

  std::vector<double> mel_rows, stop_probs, align_rows;
  auto concat = [](const Tensor& a, const Tensor& b) {
    Tensor out({a.size() + b.size()});
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[a.size() + i] = b[i];
    return out;
  };

  std::size_t frames = 0;
  while (frames < max_frames) {
    const Tensor pre = prenet(prev_mel, p.prenet, rng);
    s0 = lstm_cell(concat(pre, context), s0, p.dec_lstm0);
    const AttentionResult att = attention_step(s0.h, memory, processed, alignment, p.attn);
    alignment = att.alignment;
    context = att.context;
    s1 = lstm_cell(concat(s0.h, context), s1, p.dec_lstm1);
    const Tensor proj_in = concat(s1.h, context);
    const Tensor frame = linear(proj_in, p.mel_w, p.mel_b);
    const Tensor stop_logit = linear(proj_in, p.stop_w, p.stop_b);
    const double stop_prob = sigmoid(stop_logit[0]);

    mel_rows.insert(mel_rows.end(), frame.vec().begin(), frame.vec().end());
    align_rows.insert(align_rows.end(), alignment.vec().begin(), alignment.vec().end());
    stop_probs.push_back(stop_prob);
    prev_mel = frame;
    ++frames;
    if (stop_prob > 0.5) break;
  }

  ForwardResult result;
  result.mel = Tensor({frames, n_mels});
  result.mel.vec() = mel_rows;
  result.stop = Tensor({frames});
  result.stop.vec() = stop_probs;
  result.alignments = Tensor({frames, L});
  result.alignments.vec() = align_rows;

  // Postnet refines the whole sequence at once on [n_mels, T].
  Tensor mel_ct({n_mels, frames});
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t m = 0; m < n_mels; ++m) mel_ct.at2(m, t) = result.mel.at2(t, m);
  }
  const Tensor residual = postnet(mel_ct, p.post);
  result.mel_post = Tensor({frames, n_mels});
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t m = 0; m < n_mels; ++m) {
      result.mel_post.at2(t, m) = result.mel.at2(t, m) + residual.at2(m, t);
    }
  }
  return result;
}

}  // namespace mayektts::nn
