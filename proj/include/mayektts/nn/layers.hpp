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

// Reference implementations of the network building blocks: dense layers,
// 1-D convolution, LSTM cells, bidirectional encoding, location-sensitive
// attention, prenet, and postnet. Double precision, loop-based, no hidden
// fusions: each function is the definition the rest of the code is tested
// against.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mayektts/common.hpp"
#include "mayektts/rng.hpp"
#include "mayektts/tensor.hpp"

namespace mayektts::nn {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
  return y;
}

inline Tensor tanh_t(const Tensor& x) {
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i]);
  return y;
}

// Numerically stable softmax over a rank-1 tensor.
inline Tensor softmax(const Tensor& x) {
  if (x.rank() != 1 || x.size() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "softmax: need a non-empty vector");
  }
  Tensor y = x;
  double mx = y[0];
  for (std::size_t i = 1; i < y.size(); ++i) mx = std::max(mx, y[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::exp(y[i] - mx);
    sum += y[i];
  }
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= sum;
  return y;
}

// y = W x + b for a rank-1 input; W is [out, in], b is [out] or empty.
inline Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 1 || w.rank() != 2 || w.dim(1) != x.dim(0)) {
    throw Error(ErrorCode::ShapeMismatch, "linear: W columns must match x length");
  }
  const std::size_t out = w.dim(0);
  const std::size_t in = w.dim(1);
  if (b.size() != 0 && (b.rank() != 1 || b.dim(0) != out)) {
    throw Error(ErrorCode::ShapeMismatch, "linear: bias length must match W rows");
  }
  Tensor y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double acc = b.size() != 0 ? b[o] : 0.0;
    for (std::size_t i = 0; i < in; ++i) acc += w.at2(o, i) * x[i];
    y[o] = acc;
  }
  return y;
}

// Inverted dropout: kept units are scaled by 1/(1-p) so the expectation of
// each coordinate is preserved. p must satisfy 0 <= p < 1.
inline Tensor dropout(const Tensor& x, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidP, "dropout: need 0 <= p < 1");
  Tensor y = x;
  if (p == 0.0) return y;
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = rng.uniform() < p ? 0.0 : y[i] * scale;
  }
  return y;
}

// Centered cross-correlation with zero padding and no bias.
// x is [C_in, L], w is [C_out, C_in, k] with k odd; result is [C_out, L].
inline Tensor conv1d(const Tensor& x, const Tensor& w) {
  if (x.rank() != 2 || w.rank() != 3 || w.dim(1) != x.dim(0) || w.dim(2) % 2 == 0) {
    throw Error(ErrorCode::ShapeMismatch, "conv1d: need x [C_in, L], w [C_out, C_in, odd k]");
  }
  const std::size_t c_out = w.dim(0);
  const std::size_t c_in = w.dim(1);
  const std::size_t k = w.dim(2);
  const std::size_t len = x.dim(1);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(k / 2);
  Tensor y({c_out, len});
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t t = 0; t < len; ++t) {
      double acc = 0.0;
      for (std::size_t c = 0; c < c_in; ++c) {
        for (std::size_t j = 0; j < k; ++j) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) +
                                     static_cast<std::ptrdiff_t>(j) - half;
          if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
          acc += w.at3(o, c, j) * x.at2(c, static_cast<std::size_t>(src));
        }
      }
      y.at2(o, t) = acc;
    }
  }
  return y;
}

struct LstmParams {
  Tensor w_f, w_i, w_o, w_c;  // [hidden, in]
  Tensor u_f, u_i, u_o, u_c;  // [hidden, hidden]
  Tensor b_f, b_i, b_o, b_c;  // [hidden]

  std::size_t hidden() const { return w_f.dim(0); }
  std::size_t input() const { return w_f.dim(1); }
};

struct LstmState {
  Tensor h, c;  // [hidden]
};

// f = s(W_f x + U_f h + b_f)     i = s(W_i x + U_i h + b_i)
// o = s(W_o x + U_o h + b_o)     g = tanh(W_c x + U_c h + b_c)
// c' = f*c + i*g                 h' = o*tanh(c')
inline LstmState lstm_cell(const Tensor& x, const LstmState& prev, const LstmParams& p) {
  const std::size_t hidden = p.hidden();
  auto gate = [&](const Tensor& w, const Tensor& u, const Tensor& b) {
    Tensor pre = linear(x, w, b);
    const Tensor rec = linear(prev.h, u, Tensor{});
    for (std::size_t i = 0; i < hidden; ++i) pre[i] += rec[i];
    return pre;
  };
  const Tensor f = gate(p.w_f, p.u_f, p.b_f);
  const Tensor i = gate(p.w_i, p.u_i, p.b_i);
  const Tensor o = gate(p.w_o, p.u_o, p.b_o);
  const Tensor g = gate(p.w_c, p.u_c, p.b_c);
  LstmState next{Tensor({hidden}), Tensor({hidden})};
  for (std::size_t j = 0; j < hidden; ++j) {
    next.c[j] = sigmoid(f[j]) * prev.c[j] + sigmoid(i[j]) * std::tanh(g[j]);
    next.h[j] = sigmoid(o[j]) * std::tanh(next.c[j]);
  }
  return next;
}

inline LstmState zero_state(std::size_t hidden) {
  return LstmState{Tensor({hidden}), Tensor({hidden})};
}

// Unrolls one direction over seq [T, in]; returns [T, hidden].
inline Tensor lstm_forward(const Tensor& seq, const LstmParams& p) {
  if (seq.rank() != 2 || seq.dim(1) != p.input()) {
    throw Error(ErrorCode::ShapeMismatch, "lstm_forward: seq [T, in] mismatch");
  }
  const std::size_t T = seq.dim(0);
  const std::size_t hidden = p.hidden();
  Tensor out({T, hidden});
  LstmState state = zero_state(hidden);
  Tensor x({p.input()});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = seq.at2(t, i);
    state = lstm_cell(x, state, p);
    for (std::size_t j = 0; j < hidden; ++j) out.at2(t, j) = state.h[j];
  }
  return out;
}

// Forward and backward passes from zero initial states, concatenated per
// step: out[t] = [fwd_h[t], bwd_h[t]]. Result is [T, 2*hidden].
inline Tensor bilstm(const Tensor& seq, const LstmParams& fwd, const LstmParams& bwd) {
  if (fwd.hidden() != bwd.hidden() || fwd.input() != bwd.input()) {
    throw Error(ErrorCode::ShapeMismatch, "bilstm: direction shapes differ");
  }
  const std::size_t T = seq.dim(0);
  const std::size_t hidden = fwd.hidden();
  const Tensor f = lstm_forward(seq, fwd);
  Tensor rev({T, seq.dim(1)});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < seq.dim(1); ++i) rev.at2(t, i) = seq.at2(T - 1 - t, i);
  }
  const Tensor b = lstm_forward(rev, bwd);
  Tensor out({T, 2 * hidden});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < hidden; ++j) {
      out.at2(t, j) = f.at2(t, j);
      out.at2(t, hidden + j) = b.at2(T - 1 - t, j);
    }
  }
  return out;
}

struct AttentionParams {
  Tensor query_w;   // [attn, query_dim]
  Tensor memory_w;  // [attn, memory_dim]
  Tensor location_w;  // [attn, filters]
  Tensor filters;   // [filters, 1, k_loc]
  Tensor v;         // [attn]
  Tensor b;         // [attn]
};

struct AttentionResult {
  Tensor context;    // [memory_dim]
  Tensor alignment;  // [L]
};

// Memory projection is input-independent, so callers compute it once.
inline Tensor process_memory(const Tensor& memory, const AttentionParams& p) {
  const std::size_t L = memory.dim(0);
  const std::size_t attn = p.memory_w.dim(0);
  Tensor out({L, attn});
  Tensor row({memory.dim(1)});
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = memory.at2(i, j);
    const Tensor proj = linear(row, p.memory_w, Tensor{});
    for (std::size_t j = 0; j < attn; ++j) out.at2(i, j) = proj[j];
  }
  return out;
}

// Location-sensitive additive attention:
//   f = conv1d(prev_alignment, filters)
//   e_i = v^T tanh(W_q q + W_m h_i + W_l f_i + b)
//   alignment = softmax(e), context = sum_i alignment_i h_i
inline AttentionResult attention_step(const Tensor& query, const Tensor& memory,
                                      const Tensor& processed_memory,
                                      const Tensor& prev_alignment,
                                      const AttentionParams& p) {
  const std::size_t L = memory.dim(0);
  const std::size_t mem_dim = memory.dim(1);
  const std::size_t attn = p.v.dim(0);
  if (prev_alignment.rank() != 1 || prev_alignment.dim(0) != L ||
      processed_memory.dim(0) != L || processed_memory.dim(1) != attn) {
    throw Error(ErrorCode::ShapeMismatch, "attention_step: alignment/memory shapes differ");
  }
  Tensor align_2d({1, L});
  for (std::size_t i = 0; i < L; ++i) align_2d.at2(0, i) = prev_alignment[i];
  const Tensor loc = conv1d(align_2d, p.filters);  // [filters, L]

  const Tensor q_proj = linear(query, p.query_w, Tensor{});
  Tensor energies({L});
  Tensor loc_col({p.filters.dim(0)});
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t c = 0; c < loc_col.size(); ++c) loc_col[c] = loc.at2(c, i);
    const Tensor l_proj = linear(loc_col, p.location_w, Tensor{});
    double e = 0.0;
    for (std::size_t j = 0; j < attn; ++j) {
      e += p.v[j] * std::tanh(q_proj[j] + processed_memory.at2(i, j) + l_proj[j] + p.b[j]);
    }
    energies[i] = e;
  }
  AttentionResult result;
  result.alignment = softmax(energies);
  result.context = Tensor({mem_dim});
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < mem_dim; ++j) {
      result.context[j] += result.alignment[i] * memory.at2(i, j);
    }
  }
  return result;
}

struct PrenetParams {
  Tensor w0, b0;  // [prenet, in], [prenet]
  Tensor w1, b1;  // [prenet, prenet], [prenet]
};

// Two fully connected layers with ReLU and dropout p=0.5. Dropout stays
// active at inference; this is the model's only stochastic component.
inline Tensor prenet(const Tensor& x, const PrenetParams& p, Rng& rng) {
  const Tensor h0 = dropout(relu(linear(x, p.w0, p.b0)), 0.5, rng);
  return dropout(relu(linear(h0, p.w1, p.b1)), 0.5, rng);
}

struct PostnetParams {
  std::vector<Tensor> convs;  // 5 kernels, tanh after the first 4
};

// Residual refinement over the full mel sequence: x is [n_mels, T].
inline Tensor postnet(const Tensor& x, const PostnetParams& p) {
  if (p.convs.size() != 5) throw Error(ErrorCode::ShapeMismatch, "postnet: need 5 conv layers");
  Tensor h = x;
  for (std::size_t layer = 0; layer < p.convs.size(); ++layer) {
    h = conv1d(h, p.convs[layer]);
    if (layer + 1 < p.convs.size()) h = tanh_t(h);
  }
  return h;
}

}  // namespace mayektts::nn
