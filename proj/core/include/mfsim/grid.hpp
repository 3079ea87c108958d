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

namespace mfsim {

/// Uniform time mesh t_k = k * dt, k = 0..n_steps.
///
/// Grid identity is index based; times are always recomputed as k * dt so
/// that no floating point accumulation leaks into comparisons.
class TimeGrid {
public:
    TimeGrid(double dt, std::size_t n_steps);

    /// Builds the grid with n_steps = round(horizon / dt).
    static TimeGrid from_horizon(double dt, double horizon);

    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    double horizon() const { return static_cast<double>(n_steps_) * dt_; }
    double time(std::size_t k) const { return static_cast<double>(k) * dt_; }

    /// Same horizon with the step halved.
    TimeGrid refined() const { return TimeGrid(dt_ / 2.0, n_steps_ * 2); }

    bool operator==(const TimeGrid&) const = default;

private:
    double dt_;
    std::size_t n_steps_;
};

/// Uniform spatial mesh x_j = j * dx on the truncated half-line [0, upper].
class SpaceGrid {
public:
    SpaceGrid(double dx, double upper);

    double dx() const { return dx_; }
    double upper() const { return upper_; }
    std::size_t n_points() const { return n_points_; }
    double x(std::size_t j) const { return static_cast<double>(j) * dx_; }
    /// Last node, x_{n-1} <= upper.
    double last() const { return x(n_points_ - 1); }

    /// Trapezoid weight of node j.
    double weight(std::size_t j) const {
        return (j == 0 || j + 1 == n_points_) ? 0.5 * dx_ : dx_;
    }

    bool operator==(const SpaceGrid&) const = default;

private:
    double dx_;
    double upper_;
    std::size_t n_points_;
};

}  // namespace mfsim
