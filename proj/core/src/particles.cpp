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

#include "mfsim/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "mfsim/error.hpp"
#include "mfsim/philox.hpp"

namespace mfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// alpha (f(L + k/N) - f(L)); +infinity once a singular transform would reach its cap.
double cascade_shift(std::size_t k, std::size_t n_total, double loss_before,
                     const ModelParams& params) {
    if (k == 0) return 0.0;
    const double after = loss_before + static_cast<double>(k) / static_cast<double>(n_total);
    const auto& f = params.transform;
    if (f.singular() && after >= f.l_max()) return kInf;
    return params.alpha * f.increment(loss_before, after - loss_before);
}

}  // namespace

ParticleState make_state(std::vector<double> positions) {
    ParticleState state;
    state.alive.assign(positions.size(), 1);
    state.positions = std::move(positions);
    return state;
}

std::vector<double> sample_initial_positions(const InitialCondition& init, std::size_t n,
                                             std::uint64_t seed, double offset) {
    std::vector<double> positions(n);
    const auto purpose = static_cast<std::uint32_t>(rng::Purpose::InitialSample);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = init.is_dirac() ? 0.5 : rng::uniform({seed, particle_stream(i), 0, purpose});
        positions[i] = init.quantile(u) + offset;
    }
    return positions;
}

ParticleState diffuse_step(ParticleState state, const ModelParams& params, const Forcing& common,
                           std::span<const double> idio_increments, const TimeGrid& grid) {
    if (idio_increments.size() != state.size()) {
        throw ValidationError(fmt::format("diffuse_step: {} idiosyncratic increments for {} particles",
                                          idio_increments.size(), state.size()));
    }
    const std::size_t k = state.k;
    const double t = grid.time(k);
    const double dt = grid.dt();
    const double r = params.rho(t);
    const double idio_scale = params.sigma(t) * std::sqrt(1.0 - r * r);
    const double common_step = forcing_value(common, params, k);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!state.alive[i]) continue;
        const double x = state.positions[i];
        state.positions[i] =
            x + params.drift(t, x) * dt + idio_scale * idio_increments[i] + common_step;
    }
    state.k = k + 1;
    return state;
}

CascadeResult cascade_size(std::span<const double> alive_positions, std::size_t n_total,
                           double loss_before, const ModelParams& params) {
    const std::size_t m = alive_positions.size();
    const auto crossed = static_cast<std::size_t>(
        std::count_if(alive_positions.begin(), alive_positions.end(), [](double x) { return x <= 0.0; }));
    if (crossed == 0) return {0, 0};

    std::vector<double> window;
    std::size_t width = std::min(m, std::max<std::size_t>(2 * crossed, 16));
    std::size_t rounds = 0;
    while (true) {
        ++rounds;
        const double threshold = width == m ? kInf : cascade_shift(width, n_total, loss_before, params);
        window.clear();
        for (double x : alive_positions) {
            if (x <= threshold) window.push_back(x);
        }
        std::sort(window.begin(), window.end());

        // k* = min k with (k == m) or (p_k > shift(k)), p sorted ascending.
        for (std::size_t k = 0; k <= window.size(); ++k) {
            if (k == m) {
                if (std::isinf(cascade_shift(k, n_total, loss_before, params))) {
                    throw SaturationError(
                        fmt::format("cascade: loss would reach L_max = {} for the {} transform",
                                    params.transform.l_max(), params.transform.name()));
                }
                return {k, rounds};
            }
            const double shift = cascade_shift(k, n_total, loss_before, params);
            if (k < window.size()) {
                if (window[k] > shift) return {k, rounds};
                continue;
            }
            // Every particle outside the window lies above the threshold.
            if (shift <= threshold) return {k, rounds};
        }
        if (width == m) break;
        width = std::min(m, 2 * width);
    }
    throw NumericalError("cascade: window search failed to terminate");
}

CascadeResult resolve_cascade(ParticleState& state, const ModelParams& params) {
    std::vector<std::size_t> alive_index;
    std::vector<double> alive_pos;
    alive_index.reserve(state.size() - state.absorbed_count);
    alive_pos.reserve(state.size() - state.absorbed_count);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.alive[i]) {
            alive_index.push_back(i);
            alive_pos.push_back(state.positions[i]);
        }
    }
    const double loss_before = state.loss();
    const CascadeResult result = cascade_size(alive_pos, state.size(), loss_before, params);
    if (result.k_absorbed == 0) return result;

    // The k lowest alive particles, ties broken by index.
    std::vector<std::size_t> order(alive_index.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(result.k_absorbed),
                      order.end(), [&](std::size_t a, std::size_t b) {
                          if (alive_pos[a] != alive_pos[b]) return alive_pos[a] < alive_pos[b];
                          return alive_index[a] < alive_index[b];
                      });
    for (std::size_t r = 0; r < result.k_absorbed; ++r) state.alive[alive_index[order[r]]] = 0;
    state.absorbed_count += result.k_absorbed;

    const double shift = cascade_shift(result.k_absorbed, state.size(), loss_before, params);
    if (shift > 0.0) {
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (state.alive[i]) state.positions[i] -= shift;
        }
    }
    return result;
}

ParticleRun run_particle_system(const ModelParams& params, const InitialCondition& init,
                                const TimeGrid& grid, std::size_t n_particles,
                                const Forcing& common, std::uint64_t idio_seed,
                                const ParticleRunOptions& options) {
    if (n_particles < 1) throw ValidationError("n_particles: must be >= 1");
    const double offset = common.initial_offset();
    const double lowest = init.support_lower() + offset;
    if (!(lowest >= 0.0) || (offset != 0.0 && lowest <= 0.0)) {
        throw ValidationError("init: forcing start value pushes the initial law to the origin");
    }
    return run_particle_system(params, sample_initial_positions(init, n_particles, idio_seed),
                               grid, common, idio_seed, options);
}

ParticleRun run_particle_system(const ModelParams& params, std::vector<double> initial_positions,
                                const TimeGrid& grid, const Forcing& common,
                                std::uint64_t idio_seed, const ParticleRunOptions& options) {
    params.validate(grid, options.structural_eps);
    if (initial_positions.empty()) throw ValidationError("n_particles: must be >= 1");
    if (!(common.grid() == grid)) throw ValidationError("forcing: grid does not match the time grid");
    const double offset = common.initial_offset();
    for (double& x : initial_positions) {
        x += offset;
        if (!(x > 0.0)) throw ValidationError("init: initial positions must be > 0");
    }

    ParticleRun run{LossPath(grid), {}, false};
    ParticleState state = make_state(std::move(initial_positions));
    const std::size_t n = state.size();
    const IdiosyncraticNoise idio(idio_seed, grid.dt());
    std::vector<double> increments(n, 0.0);

    auto maybe_snapshot = [&] {
        if (options.snapshot_every > 0 && state.k % options.snapshot_every == 0) {
            run.snapshots.push_back(state);
        }
    };
    maybe_snapshot();

    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            increments[i] = state.alive[i] ? idio.increment(i, k) : 0.0;
        }
        state = diffuse_step(std::move(state), params, common, increments, grid);

        std::size_t crossed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (state.alive[i] && state.positions[i] <= 0.0) ++crossed;
        }
        CascadeResult cascade;
        try {
            cascade = resolve_cascade(state, params);
        } catch (const SaturationError&) {
            run.saturated = true;
            break;
        }
        run.loss.push(state.loss());
        if (cascade.k_absorbed > 0) {
            run.loss.add_jump({state.k,
                               static_cast<double>(cascade.k_absorbed) / static_cast<double>(n),
                               cascade.k_absorbed > crossed ? JumpCause::Cascade
                                                            : JumpCause::DiffusionStep});
        }
        maybe_snapshot();
    }
    return run;
}

Density empirical_density(const ParticleState& state, const SpaceGrid& grid) {
    std::vector<double> counts(grid.n_points(), 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!state.alive[i]) continue;
        const double p = std::round(state.positions[i] / grid.dx());
        if (p < 0.0 || p > static_cast<double>(grid.n_points() - 1)) continue;
        counts[static_cast<std::size_t>(p)] += 1.0;
    }
    const double n = static_cast<double>(state.size());
    for (std::size_t j = 0; j < counts.size(); ++j) counts[j] /= n * grid.weight(j);
    return Density(grid, std::move(counts));
}

}  // namespace mfsim
