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
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "mfsim/grid.hpp"
#include "mfsim/params.hpp"

namespace mfsim {

/// Stream ids: common noise is stream 0, particle i (0-based) is stream i + 1.
inline constexpr std::uint32_t kCommonStream = 0;
inline std::uint32_t particle_stream(std::size_t i) { return static_cast<std::uint32_t>(i + 1); }

/// Brownian increments on a time grid, regenerated bit-identically from (seed, stream).
class NoisePath {
public:
    NoisePath(TimeGrid grid, std::uint64_t seed, std::uint32_t stream,
              std::vector<double> increments, unsigned refinement_level = 0);

    const TimeGrid& grid() const { return grid_; }
    std::uint64_t seed() const { return seed_; }
    std::uint32_t stream() const { return stream_; }
    std::span<const double> increments() const { return increments_; }
    double increment(std::size_t k) const { return increments_.at(k); }
    unsigned refinement_level() const { return level_; }

    /// Path on the grid with dt / 2 whose pairwise sums reproduce this path
    /// exactly (Brownian bridge midpoints, drawn from a dedicated purpose).
    NoisePath refined() const;

private:
    TimeGrid grid_;
    std::uint64_t seed_;
    std::uint32_t stream_;
    std::vector<double> increments_;
    unsigned level_;
};

/// n_steps i.i.d. N(0, dt) increments keyed by (seed, stream, step index).
NoisePath generate_noise(std::uint64_t seed, const TimeGrid& grid,
                         std::uint32_t stream = kCommonStream);

/// Single increment of stream `stream` at step k; equals generate_noise(...).increment(k).
double brownian_increment(std::uint64_t seed, std::uint32_t stream, std::size_t k, double dt);

/// CSV `k,increment`.
void write_noise_csv(std::ostream& out, const NoisePath& path);
/// Reads a stored path for replay on `grid` (row count must equal n_steps).
NoisePath read_noise_csv(std::istream& in, const TimeGrid& grid);

/// Common forcing of the particle positions.
///
/// BrownianScaled contributes sigma(t_k) rho(t_k) dB^0_k per step; a
/// Deterministic path contributes path(t_{k+1}) - path(t_k). A deterministic
/// path may start away from 0: that start value displaces the initial
/// condition at t = 0 (see initial_offset()).
class Forcing {
public:
    struct BrownianScaled {
        NoisePath noise;
    };
    struct Deterministic {
        TimeGrid grid;
        std::vector<double> path;  // values at t_0..t_n
    };

    static Forcing brownian(NoisePath noise);
    static Forcing deterministic(TimeGrid grid, std::vector<double> path);
    static Forcing deterministic(const TimeGrid& grid, const std::function<double(double)>& fn);
    /// Zero forcing.
    static Forcing none(const TimeGrid& grid);

    const TimeGrid& grid() const;
    bool is_deterministic() const { return std::holds_alternative<Deterministic>(variant_); }
    const std::variant<BrownianScaled, Deterministic>& variant() const { return variant_; }

    double initial_offset() const;

    /// Forcing on the refined grid; deterministic paths are linearly interpolated.
    Forcing refined() const;

private:
    explicit Forcing(std::variant<BrownianScaled, Deterministic> v) : variant_(std::move(v)) {}

    std::variant<BrownianScaled, Deterministic> variant_;
};

/// Displacement increment of the common forcing over step k -> k+1.
double forcing_value(const Forcing& forcing, const ModelParams& params, std::size_t k);

}  // namespace mfsim
