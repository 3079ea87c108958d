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

#include "mfsim/grid.hpp"

#include <cmath>
#include <string>

#include "mfsim/error.hpp"

namespace mfsim {

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("time grid: dt must be a finite positive number, got " +
                              std::to_string(dt));
    }
    if (n_steps < 1) {
        throw ValidationError("time grid: n_steps must be >= 1");
    }
}

TimeGrid TimeGrid::from_horizon(double dt, double horizon) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("time grid: dt must be a finite positive number, got " +
                              std::to_string(dt));
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ValidationError("time grid: t_final must be a finite positive number, got " +
                              std::to_string(horizon));
    }
    const double steps = std::round(horizon / dt);
    if (steps < 1.0) {
        throw ValidationError("time grid: t_final must be at least one step dt");
    }
    return TimeGrid(dt, static_cast<std::size_t>(steps));
}

SpaceGrid::SpaceGrid(double dx, double upper) : dx_(dx), upper_(upper), n_points_(0) {
    if (!(dx > 0.0) || !std::isfinite(dx)) {
        throw ValidationError("space grid: dx must be a finite positive number, got " +
                              std::to_string(dx));
    }
    if (!(upper > 0.0) || !std::isfinite(upper)) {
        throw ValidationError("space grid: upper must be a finite positive number, got " +
                              std::to_string(upper));
    }
    // The small relative slack keeps u = m * dx from losing its last node to rounding.
    const double cells = std::floor(upper / dx * (1.0 + 1e-12));
    if (cells < 1.0) {
        throw ValidationError("space grid: upper must be >= dx");
    }
    n_points_ = static_cast<std::size_t>(cells) + 1;
}

}  // namespace mfsim
