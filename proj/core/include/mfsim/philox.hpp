/*
   Copyright 2026 The mfsim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// Draws are pure functions of (seed, stream, index, purpose): no generator
// state is shared, so workers can draw disjoint streams concurrently.

#include <array>
#include <cstdint>

namespace mfsim::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32(Counter counter, Key key);

/// What a draw is used for; distinct purposes never share counters.
enum class Purpose : std::uint32_t {
    Increment = 0,
    InitialSample = 1,
    BridgeRefinement = 0x100,  // + refinement level
};

struct DrawId {
    std::uint64_t seed;
    std::uint32_t stream;
    std::uint64_t index;
    std::uint32_t purpose;
};

/// Two uniforms in the open interval (0, 1) with 53-bit resolution.
std::array<double, 2> uniform_pair(const DrawId& id);

/// Standard normal via Box-Muller on uniform_pair(id).
double standard_normal(const DrawId& id);

inline double uniform(const DrawId& id) { return uniform_pair(id)[0]; }

}  // namespace mfsim::rng
