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

// MTTW weight files: little-endian, magic "MTTW", version byte, then one
// record per tensor in a fixed order:
//   name_len:u32  name:bytes  ndim:u32  dims:u32[ndim]  data:f32[prod(dims)]
// Values are stored as f32; init_params quantizes through f32 so a round
// trip reproduces parameters exactly.

#pragma once

#include <cstdint>
#include <cstring>
#include <string>

#include "mayektts/audio.hpp"
#include "mayektts/common.hpp"
#include "mayektts/nn/tacotron.hpp"
#include "mayektts/tensor.hpp"
#include "mayektts/textio.hpp"

namespace mayektts::nn {

inline constexpr uint8_t kWeightsVersion = 1;

inline void save_weights(const std::string& path, const Tacotron2Params& params) {
  std::string out;
  out += "MTTW";
  out.push_back(static_cast<char>(kWeightsVersion));
  detail_nn::for_each_tensor(params, [&](const std::string& name, const Tensor& t) {
    detail_wav::put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    detail_wav::put_u32(out, static_cast<uint32_t>(t.rank()));
    for (std::size_t i = 0; i < t.rank(); ++i) {
      detail_wav::put_u32(out, static_cast<uint32_t>(t.dim(i)));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      const float f = static_cast<float>(t[i]);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      detail_wav::put_u32(out, u);
    }
  });
  write_text_file(path, out);
}

// Loads into a parameter set already shaped by make_params(dims); every
// stored record must match the expected name and shape in order.
inline Tacotron2Params load_weights(const std::string& path, const Dims& dims) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() < 5 || bytes.compare(0, 4, "MTTW") != 0) {
    throw Error(ErrorCode::BadMagic, "not an MTTW file: " + path);
  }
  if (static_cast<uint8_t>(bytes[4]) != kWeightsVersion) {
    throw Error(ErrorCode::BadMagic, "unsupported MTTW version in " + path);
  }
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t pos = 5;
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) throw Error(ErrorCode::TruncatedFile, "truncated MTTW file: " + path);
  };
  auto take_u32 = [&]() {
    need(4);
    const uint32_t v = detail_wav::read_u32(base + pos);
    pos += 4;
    return v;
  };

  Tacotron2Params params = make_params(dims);
  detail_nn::for_each_tensor(params, [&](const std::string& name, Tensor& t) {
    const uint32_t name_len = take_u32();
    need(name_len);
    const std::string stored(bytes, pos, name_len);
    pos += name_len;
    if (stored != name) {
      throw Error(ErrorCode::ShapeMismatch,
                  "MTTW tensor order mismatch: expected " + name + ", found " + stored);
    }
    const uint32_t ndim = take_u32();
    if (ndim != t.rank()) {
      throw Error(ErrorCode::ShapeMismatch, "MTTW rank mismatch for " + name);
    }
    for (std::size_t i = 0; i < ndim; ++i) {
      if (take_u32() != t.dim(i)) {
        throw Error(ErrorCode::ShapeMismatch, "MTTW shape mismatch for " + name);
      }
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      const uint32_t u = take_u32();
      float f;
      std::memcpy(&f, &u, 4);
      t[i] = f;
    }
  });
  if (pos != bytes.size()) {
    throw Error(ErrorCode::ShapeMismatch, "trailing bytes in MTTW file: " + path);
  }
  return params;
}

}  // namespace mayektts::nn
