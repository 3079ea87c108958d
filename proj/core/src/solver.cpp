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

#include "mfsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mfsim/error.hpp"
#include "mfsim/numeric.hpp"

namespace mfsim {

namespace {

// exp(-2 x y / v) below this contributes nothing at double precision.
constexpr double kImageCutoff = 40.0;

double image_factor(double x, double y, double variance) {
    const double e = 2.0 * x * y / variance;
    return e >= kImageCutoff ? 1.0 : -std::expm1(-e);
}

double leak_above(double last, double centre, double sd) {
    return numeric::normal_sf((last - centre) / sd);
}

HeatStepResult heat_from_dirac(const DiracMass& dirac, const ModelParams& params,
                               double drift_shift, double t, double dt, double variance,
                               const SpaceGrid& grid, const HeatKernelOptions& options) {
    const double sd = std::sqrt(variance);
    const double centre = dirac.x0 + drift_shift + params.drift(t, dirac.x0) * dt;
    const double half = options.kernel_width * sd;
    std::vector<double> u(grid.n_points(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double z = grid.x(i) - centre;
        if (std::abs(z) > half) continue;
        double value = numeric::gaussian_kernel(z, variance);
        if (options.image_kernel) value *= image_factor(grid.x(i), dirac.x0, variance);
        u[i] = value;
    }
    const double leak = leak_above(grid.last(), centre, sd);
    return {Density(grid, std::move(u), leak), leak};
}

HeatStepResult heat_from_density(const Density& source, const ModelParams& params,
                                 double drift_shift, double t, double dt, double variance,
                                 const SpaceGrid& grid, const HeatKernelOptions& options) {
    if (!(source.grid() == grid)) throw ValidationError("heat_step: source grid differs from target grid");
    const auto n = grid.n_points();
    const double dx = grid.dx();
    const double sd = std::sqrt(variance);
    const double half = options.kernel_width * sd;
    const double last = grid.last();

    std::vector<double> weighted(n);
    for (std::size_t j = 0; j < n; ++j) weighted[j] = grid.weight(j) * source.value(j);

    std::vector<double> u(n, 0.0);
    double leak = 0.0;

    if (params.drift.space_independent()) {
        const double mu = drift_shift + params.drift(t, 0.0) * dt;
        const auto d_min = static_cast<long>(std::ceil((mu - half) / dx));
        const auto d_max = static_cast<long>(std::floor((mu + half) / dx));
        std::vector<double> stencil(static_cast<std::size_t>(std::max(0L, d_max - d_min + 1)));
        for (long d = d_min; d <= d_max; ++d) {
            stencil[static_cast<std::size_t>(d - d_min)] =
                numeric::gaussian_kernel(static_cast<double>(d) * dx - mu, variance);
        }
        const long nl = static_cast<long>(n);
        for (long i = 0; i < nl; ++i) {
            const long j_lo = std::max(0L, i - d_max);
            const long j_hi = std::min(nl - 1, i - d_min);
            double acc = 0.0;
            for (long j = j_lo; j <= j_hi; ++j) {
                acc += stencil[static_cast<std::size_t>(i - j - d_min)] * weighted[static_cast<std::size_t>(j)];
            }
            u[static_cast<std::size_t>(i)] = acc;
        }
        if (options.image_kernel) {
            // Only targets near the origin feel the image term.
            const double band = 10.0 * sd + std::abs(mu) + dx;
            for (long i = 0; i < nl && static_cast<double>(i) * dx <= band; ++i) {
                const double x = static_cast<double>(i) * dx;
                const long j_lo = std::max(0L, i - d_max);
                const long j_hi = std::min(nl - 1, i - d_min);
                double correction = 0.0;
                for (long j = j_lo; j <= j_hi; ++j) {
                    const double y = static_cast<double>(j) * dx;
                    const double e = 2.0 * x * y / variance;
                    if (e >= kImageCutoff) continue;
                    correction += stencil[static_cast<std::size_t>(i - j - d_min)] *
                                  weighted[static_cast<std::size_t>(j)] * std::exp(-e);
                }
                u[static_cast<std::size_t>(i)] = std::max(0.0, u[static_cast<std::size_t>(i)] - correction);
            }
        }
        for (std::size_t j = n; j-- > 0;) {
            const double centre = grid.x(j) + mu;
            if (last - centre > half) break;
            leak += weighted[j] * leak_above(last, centre, sd);
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            if (weighted[j] == 0.0) continue;
            const double y = grid.x(j);
            const double centre = y + drift_shift + params.drift(t, y) * dt;
            const double lo = std::max(0.0, std::ceil((centre - half) / dx));
            const double hi = std::min(static_cast<double>(n - 1), std::floor((centre + half) / dx));
            for (double p = lo; p <= hi; p += 1.0) {
                const auto i = static_cast<std::size_t>(p);
                double value = numeric::gaussian_kernel(grid.x(i) - centre, variance);
                if (options.image_kernel) value *= image_factor(grid.x(i), y, variance);
                u[i] += weighted[j] * value;
            }
            if (last - centre <= half) leak += weighted[j] * leak_above(last, centre, sd);
        }
    }
    return {Density(grid, std::move(u), source.leaked_mass() + leak), leak};
}

}  // namespace

void SolverConfig::validate() const {
    if (!(fp_eps > 0.0)) throw ValidationError("fp_eps: must be > 0");
    if (fp_max_iter < 1) throw ValidationError("fp_max_iter: must be >= 1");
    if (!(jump_threshold > 0.0 && jump_threshold < 1.0)) {
        throw ValidationError("jump_threshold: must lie in (0, 1)");
    }
    if (!(kernel_width >= 4.0)) throw ValidationError("kernel_width: must be >= 4 standard deviations");
    if (!(confirm_window >= 0.0)) throw ValidationError("confirm_window: must be >= 0");
    if (!(confirm_ratio > 0.0 && confirm_ratio <= 1.0)) {
        throw ValidationError("confirm_ratio: must lie in (0, 1]");
    }
}

HeatStepResult heat_step(const SourceMeasure& source, const ModelParams& params,
                         double drift_shift, double t, double dt, const SpaceGrid& grid,
                         const HeatKernelOptions& options) {
    const double variance = params.idiosyncratic_variance(t, dt);
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw NumericalError(fmt::format(
            "heat_step: kernel variance sigma^2 (1 - rho^2) dt = {} must be > 0", variance));
    }
    if (const auto* dirac = std::get_if<DiracMass>(&source)) {
        return heat_from_dirac(*dirac, params, drift_shift, t, dt, variance, grid, options);
    }
    return heat_from_density(std::get<Density>(source), params, drift_shift, t, dt, variance, grid,
                             options);
}

FixedPointResult contagion_fixed_point(const Density& candidate, double diffusive_loss,
                                       double loss_before, const ModelParams& params,
                                       const FixedPointOptions& options) {
    const auto& f = params.transform;
    const CdfTable cdf_u(candidate);
    auto shift_for = [&](double step) {
        const double after = loss_before + step;
        if (f.singular() && after >= f.l_max()) {
            throw SaturationError(fmt::format(
                "contagion: loss {} reached L_max = {} for the {} transform", after, f.l_max(),
                f.name()));
        }
        return params.alpha * f.increment(loss_before, step);
    };

    FixedPointResult result;
    double current = diffusive_loss;
    if (options.record_iterates) result.iterates.push_back(current);
    while (true) {
        const double next = diffusive_loss + cdf_u(shift_for(current));
        ++result.iterations;
        if (options.record_iterates) result.iterates.push_back(next);
        const double increment = next - current;
        current = next;
        if (increment < options.eps) break;
        if (result.iterations >= options.max_iter) {
            result.converged = false;
            break;
        }
    }
    result.step_loss = current;
    return result;
}

std::size_t SolverOutput::confirmed_blowups() const {
    return static_cast<std::size_t>(std::count_if(blowup_events.begin(), blowup_events.end(),
                                                  [](const BlowupEvent& e) { return e.confirmed; }));
}

namespace {

void check_resolution(const ModelParams& params, const SolverConfig& config, double dt) {
    const auto& grid = config.time;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double v = params.idiosyncratic_variance(grid.time(k), dt);
        if (config.space.dx() > 0.5 * std::sqrt(v)) {
            throw ValidationError(fmt::format(
                "dx: {} does not resolve the one-step kernel (need dx <= sqrt(v)/2 = {} at t={})",
                config.space.dx(), 0.5 * std::sqrt(v), grid.time(k)));
        }
    }
}

SolverOutput solve(const ModelParams& params, const InitialCondition& init,
                   const SolverConfig& config, const Forcing& common) {
    const auto& tgrid = config.time;
    const auto& sgrid = config.space;
    const double dt = tgrid.dt();

    SolverOutput out{LossPath(tgrid), {}, {}, {}, 0.0, false, std::nullopt, 0, std::nullopt};

    const InitialCondition start = init.shifted(common.initial_offset());
    SourceMeasure current = start.is_dirac()
                                ? SourceMeasure(DiracMass{std::get<InitialCondition::Dirac>(start.variant()).x0})
                                : SourceMeasure(start.tabulate(sgrid));
    double previous_mass = 1.0;
    if (const auto* d = std::get_if<Density>(&current)) {
        previous_mass = total_mass(*d);
        if (config.snapshot_every > 0) out.snapshots.emplace_back(0, *d);
    }

    double loss = 0.0;
    const HeatKernelOptions kernel{config.image_kernel, config.kernel_width};
    const FixedPointOptions fp{config.fp_eps, config.fp_max_iter, false};

    for (std::size_t k = 0; k < tgrid.n_steps(); ++k) {
        const double t = tgrid.time(k);
        const double drift_shift = forcing_value(common, params, k);
        HeatStepResult heat = heat_step(current, params, drift_shift, t, dt, sgrid, kernel);

        const double diffusive =
            std::max(0.0, previous_mass - total_mass(heat.candidate) - heat.step_leak);
        FixedPointResult step;
        try {
            step = contagion_fixed_point(heat.candidate, diffusive, loss, params, fp);
        } catch (const SaturationError&) {
            out.saturated = true;
            out.saturation_step = k + 1;
            break;
        }
        if (!step.converged) ++out.nonconverged_steps;
        // Quadrature round-off in the mass balance can overshoot a total default.
        step.step_loss = std::min(step.step_loss, 1.0 - loss);

        const double shift = params.alpha * params.transform.increment(loss, step.step_loss);
        Density next = shift_density(heat.candidate, shift);
        loss += step.step_loss;
        out.loss.push(loss);

        const double contagion = step.step_loss - diffusive;
        if (contagion > config.jump_threshold) {
            out.blowup_events.push_back({k + 1, step.step_loss, contagion, false});
            out.loss.add_jump({k + 1, step.step_loss, JumpCause::Cascade});
        }

        previous_mass = total_mass(next);
        out.diagnostics.push_back({k + 1, out.loss.final_value(), previous_mass, next.leaked_mass(),
                                   sup_norm(next), diffusive, step.iterations, step.converged});
        if (config.snapshot_every > 0 && (k + 1) % config.snapshot_every == 0) {
            out.snapshots.emplace_back(k + 1, next);
        }
        current = std::move(next);
    }

    if (const auto* d = std::get_if<Density>(&current)) {
        out.leaked_mass_total = d->leaked_mass();
        out.final_density = *d;
    }
    return out;
}

}  // namespace

SolverOutput run_density_solver(const ModelParams& params, const InitialCondition& init,
                                const SolverConfig& config, const Forcing& common) {
    config.validate();
    params.validate(config.time, config.structural_eps);
    if (!(common.grid() == config.time)) {
        throw ValidationError("forcing: grid does not match the solver time grid");
    }
    const double offset = common.initial_offset();
    // A law with density on (0, inf) may touch the origin; a displaced one may not.
    const double lowest = init.support_lower() + offset;
    if (!(lowest >= 0.0) || (offset != 0.0 && lowest <= 0.0)) {
        throw ValidationError("init: must be supported in (0, upper) after the forcing start value");
    }
    if (std::isfinite(init.support_upper()) && init.support_upper() + offset >= config.space.last()) {
        throw ValidationError(fmt::format("init: support must lie below the upper truncation {}",
                                          config.space.last()));
    }
    check_resolution(params, config, config.time.dt());
    if (config.confirm_blowups) check_resolution(params, config, 0.5 * config.time.dt());

    SolverOutput out = solve(params, init, config, common);
    if (!config.confirm_blowups || out.blowup_events.empty()) return out;

    SolverConfig fine_config = config;
    fine_config.time = config.time.refined();
    fine_config.confirm_blowups = false;
    fine_config.snapshot_every = 0;
    const SolverOutput fine = solve(params, init, fine_config, common.refined());

    const auto& fine_grid = fine_config.time;
    for (auto& event : out.blowup_events) {
        const double t = config.time.time(event.k);
        for (const auto& other : fine.blowup_events) {
            if (std::abs(fine_grid.time(other.k) - t) <= config.confirm_window) {
                event.refined_contagion = std::max(event.refined_contagion, other.contagion_loss);
            }
        }
        // A jump keeps its size under refinement; a steep ramp shrinks with the step.
        event.confirmed = event.refined_contagion >= config.confirm_ratio * event.contagion_loss;
        if (!event.confirmed && fine.saturated &&
            std::abs(fine_grid.time(*fine.saturation_step) - t) <= config.confirm_window) {
            event.confirmed = true;
        }
    }
    return out;
}

}  // namespace mfsim
