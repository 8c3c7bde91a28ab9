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

#include "mayektts/common.hpp"  // IWYU pragma: export

#include "mayektts/audio.hpp"        // IWYU pragma: export
#include "mayektts/config.hpp"       // IWYU pragma: export
#include "mayektts/corpus.hpp"       // IWYU pragma: export
#include "mayektts/features.hpp"     // IWYU pragma: export
#include "mayektts/fft.hpp"          // IWYU pragma: export
#include "mayektts/g2p.hpp"          // IWYU pragma: export
#include "mayektts/normalize.hpp"    // IWYU pragma: export
#include "mayektts/rng.hpp"          // IWYU pragma: export
#include "mayektts/script.hpp"       // IWYU pragma: export
#include "mayektts/tensor.hpp"       // IWYU pragma: export
#include "mayektts/textio.hpp"       // IWYU pragma: export
#include "mayektts/unicode.hpp"      // IWYU pragma: export

#include "mayektts/nn/backward.hpp"   // IWYU pragma: export
#include "mayektts/nn/gradcheck.hpp"  // IWYU pragma: export
#include "mayektts/nn/layers.hpp"     // IWYU pragma: export
#include "mayektts/nn/schedule.hpp"   // IWYU pragma: export
#include "mayektts/nn/tacotron.hpp"   // IWYU pragma: export
#include "mayektts/nn/weights.hpp"    // IWYU pragma: export
