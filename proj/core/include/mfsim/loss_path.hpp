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
#include <iosfwd>
#include <string>
#include <vector>

#include "mfsim/grid.hpp"

namespace mfsim {

enum class JumpCause { DiffusionStep, Cascade };

std::string to_string(JumpCause cause);

struct JumpEvent {
    std::size_t k;
    double size;
    JumpCause cause;
};

/// Record of L on the time grid: values[k] = L at t_k for k = 0..last_index().
///
/// The record may stop before the grid horizon when a run terminates early
/// (saturation). `jumps` lists the explicitly attributed loss increments.
class LossPath {
public:
    explicit LossPath(TimeGrid grid);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<JumpEvent>& jumps() const { return jumps_; }
    double value(std::size_t k) const { return values_.at(k); }
    double final_value() const { return values_.back(); }
    std::size_t last_index() const { return values_.size() - 1; }

    /// Appends L at the next grid index; values must be nondecreasing and in [0, 1].
    void push(double loss);
    void add_jump(JumpEvent jump);

    /// Re-checks every invariant; throws NumericalError on violation.
    void check_invariants(double tolerance = 1e-12) const;

private:
    TimeGrid grid_;
    std::vector<double> values_;
    std::vector<JumpEvent> jumps_;
};

/// max_k |a_k - b_k| over the common index range.
double sup_distance(const LossPath& a, const LossPath& b);

/// CSV `t_index,t,L,jump_size`; jump_size is the attributed jump at that index (0 if none).
void write_loss_csv(std::ostream& out, const LossPath& path);

}  // namespace mfsim
