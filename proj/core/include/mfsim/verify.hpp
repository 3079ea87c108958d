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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfsim/params.hpp"

namespace mfsim {

/// Absorbed count of the cascade computed by plain rounds: absorb every
/// alive particle at or below alpha (f(L + m/N) - f(L)) for the running
/// count m until m stops changing. nullopt when the loss would reach the
/// cap of a singular transform.
std::optional<std::size_t> cascade_by_rounds(std::span<const double> alive_positions,
                                             std::size_t n_total, double loss_before,
                                             const ModelParams& params);

struct VerifyCheck {
    std::string name;
    bool passed = true;
    std::size_t cases = 0;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t cases = 200;      // random configurations per cheap suite
    std::size_t solver_runs = 8;  // random solver configurations
    unsigned threads = 0;
};

/// Runs the randomized invariant suites. Deterministic for fixed options.
std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& options);

/// CSV `check,status,cases,detail`.
void write_verify_csv(std::ostream& out, const std::vector<VerifyCheck>& checks);

}  // namespace mfsim
