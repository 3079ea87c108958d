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
#include <span>
#include <vector>

#include "mfsim/density.hpp"
#include "mfsim/grid.hpp"
#include "mfsim/initial.hpp"
#include "mfsim/loss_path.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/params.hpp"

namespace mfsim {

/// Positions and survival flags of the N-particle system at step k.
struct ParticleState {
    std::vector<double> positions;
    std::vector<std::uint8_t> alive;
    std::size_t absorbed_count = 0;
    std::size_t k = 0;

    std::size_t size() const { return positions.size(); }
    /// L^N = absorbed / N.
    double loss() const {
        return static_cast<double>(absorbed_count) / static_cast<double>(positions.size());
    }
};

/// All particles alive at the given positions, k = 0.
ParticleState make_state(std::vector<double> positions);

/// N i.i.d. draws from `init` keyed by (seed, particle stream), displaced by `offset`.
std::vector<double> sample_initial_positions(const InitialCondition& init, std::size_t n,
                                             std::uint64_t seed, double offset = 0.0);

struct CascadeResult {
    std::size_t k_absorbed = 0;
    std::size_t rounds = 0;
};

/// Euler-Maruyama step k -> k+1 without feedback: each alive particle moves by
/// b(t_k, X) dt + sigma(t_k) sqrt(1 - rho(t_k)^2) dB^i_k + common increment.
/// `idio_increments[i]` is dB^i_k for particle i (ignored for dead particles).
ParticleState diffuse_step(ParticleState state, const ModelParams& params, const Forcing& common,
                           std::span<const double> idio_increments, const TimeGrid& grid);

/// Smallest k >= 0 with #{alive i : X_i <= alpha (f(L + k/N) - f(L))} <= k,
/// for L the loss before the step. Works on a sorted candidate window that
/// doubles until the answer is certified; `rounds` counts the windows.
CascadeResult cascade_size(std::span<const double> alive_positions, std::size_t n_total,
                           double loss_before, const ModelParams& params);

/// Applies the discrete minimal-jump rule to the post-diffusion state: the
/// k_absorbed lowest alive particles die (ties by index) and survivors shift
/// down by alpha (f(L + k/N) - f(L)). Throws SaturationError when a singular
/// transform would be evaluated at or beyond L_max.
CascadeResult resolve_cascade(ParticleState& state, const ModelParams& params);

/// Per-particle Brownian increments drawn on the fly from the counter-based generator.
class IdiosyncraticNoise {
public:
    IdiosyncraticNoise(std::uint64_t seed, double dt) : seed_(seed), dt_(dt) {}
    double increment(std::size_t particle, std::size_t k) const {
        return brownian_increment(seed_, particle_stream(particle), k, dt_);
    }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    double dt_;
};

struct ParticleRun {
    LossPath loss;
    std::vector<ParticleState> snapshots;
    bool saturated = false;
};

struct ParticleRunOptions {
    std::size_t snapshot_every = 0;  // 0: no snapshots
    double structural_eps = ModelParams::kDefaultStructuralEps;
};

/// Samples N initial positions from `init` (seeded by idio_seed), then
/// alternates diffuse_step and resolve_cascade over the grid.
ParticleRun run_particle_system(const ModelParams& params, const InitialCondition& init,
                                const TimeGrid& grid, std::size_t n_particles,
                                const Forcing& common, std::uint64_t idio_seed,
                                const ParticleRunOptions& options = {});

/// Same, from explicit initial positions (the forcing's initial offset is still applied).
ParticleRun run_particle_system(const ModelParams& params, std::vector<double> initial_positions,
                                const TimeGrid& grid, const Forcing& common,
                                std::uint64_t idio_seed, const ParticleRunOptions& options = {});

/// Histogram of alive particles on the grid nodes, normalised to mass alive / N.
Density empirical_density(const ParticleState& state, const SpaceGrid& grid);

}  // namespace mfsim
