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

#include "mfsim/loss_path.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "mfsim/error.hpp"

namespace mfsim {

std::string to_string(JumpCause cause) {
    return cause == JumpCause::Cascade ? "cascade" : "diffusion-step";
}

LossPath::LossPath(TimeGrid grid) : grid_(grid) {
    values_.reserve(grid.n_steps() + 1);
    values_.push_back(0.0);
}

void LossPath::push(double loss) {
    if (values_.size() > grid_.n_steps()) {
        throw NumericalError("loss path: more values than grid points");
    }
    if (!(loss >= values_.back() - 1e-12) || loss > 1.0 + 1e-9) {
        throw NumericalError(fmt::format("loss path: L = {} after {} breaks monotonicity or [0,1]",
                                         loss, values_.back()));
    }
    loss = std::clamp(std::max(loss, values_.back()), 0.0, 1.0);
    values_.push_back(loss);
}

void LossPath::add_jump(JumpEvent jump) {
    if (!(jump.size > 0.0)) throw NumericalError("loss path: jump sizes must be positive");
    if (jump.k >= values_.size()) throw NumericalError("loss path: jump index beyond record");
    jumps_.push_back(jump);
}

void LossPath::check_invariants(double tolerance) const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] < -tolerance || values_[k] > 1.0 + tolerance) {
            throw NumericalError(fmt::format("loss path: L[{}] = {} outside [0,1]", k, values_[k]));
        }
        if (k > 0 && values_[k] + tolerance < values_[k - 1]) {
            throw NumericalError(fmt::format("loss path: decrease at index {}", k));
        }
    }
    double total = 0.0;
    for (const auto& j : jumps_) {
        if (!(j.size > 0.0)) throw NumericalError("loss path: nonpositive jump");
        total += j.size;
    }
    if (total > final_value() + tolerance) {
        throw NumericalError("loss path: jumps sum to more than the final loss");
    }
}

double sup_distance(const LossPath& a, const LossPath& b) {
    const auto n = std::min(a.values().size(), b.values().size());
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(a.value(k) - b.value(k)));
    }
    return worst;
}

void write_loss_csv(std::ostream& out, const LossPath& path) {
    std::vector<double> jump_at(path.values().size(), 0.0);
    for (const auto& j : path.jumps()) jump_at[j.k] += j.size;
    out << "t_index,t,L,jump_size\n";
    for (std::size_t k = 0; k < path.values().size(); ++k) {
        out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", k, path.grid().time(k), path.value(k),
                           jump_at[k]);
    }
}

}  // namespace mfsim
