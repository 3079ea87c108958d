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
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "mfsim/density.hpp"
#include "mfsim/grid.hpp"
#include "mfsim/initial.hpp"
#include "mfsim/loss_path.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/params.hpp"

namespace mfsim {

struct SolverConfig {
    TimeGrid time;
    SpaceGrid space;
    /// Stop the contagion iteration once an increment falls below this.
    double fp_eps = 1e-10;
    std::size_t fp_max_iter = 100000;
    /// A step whose contagion loss exceeds this is flagged as a blow-up event.
    double jump_threshold = 0.05;
    /// Use the exact killed Gaussian within a step instead of the free kernel.
    bool image_kernel = false;
    /// Kernel truncation in standard deviations.
    double kernel_width = 8.0;
    /// Store V every this many steps (0: none).
    std::size_t snapshot_every = 0;
    /// Re-run with dt / 2 and keep only events that persist.
    bool confirm_blowups = true;
    /// Max time distance between a coarse event and its refined counterpart.
    double confirm_window = 0.05;
    /// The refined counterpart must carry at least this fraction of the
    /// coarse contagion loss.
    double confirm_ratio = 0.85;
    double structural_eps = ModelParams::kDefaultStructuralEps;

    SolverConfig(TimeGrid time_grid, SpaceGrid space_grid) : time(time_grid), space(space_grid) {}

    void validate() const;
};

struct DiracMass {
    double x0;
};

/// Source of one heat step: the symbolic initial Dirac mass or a tabulated density.
using SourceMeasure = std::variant<DiracMass, Density>;

struct HeatKernelOptions {
    bool image_kernel = false;
    double kernel_width = 8.0;
};

struct HeatStepResult {
    /// Candidate U on [0, upper]; its leaked_mass includes this step's leak.
    Density candidate;
    /// Mass transported above the last node during this step.
    double step_leak = 0.0;
};

/// U(x_i) = sum_j w_j K(x_i - y_j - mu_j; v) V(y_j), v = sigma^2 (1 - rho^2) dt,
/// mu_j = drift_shift + b(t, y_j) dt, trapezoid weights w_j. A Dirac source is
/// evaluated analytically. Throws NumericalError if v <= 0.
HeatStepResult heat_step(const SourceMeasure& source, const ModelParams& params,
                         double drift_shift, double t, double dt, const SpaceGrid& grid,
                         const HeatKernelOptions& options = {});

struct FixedPointOptions {
    double eps = 1e-10;
    std::size_t max_iter = 100000;
    bool record_iterates = false;
};

struct FixedPointResult {
    double step_loss = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    std::vector<double> iterates;  // dL^(0), dL^(1), ... when recorded
};

/// Monotone iteration dL <- dL0 + cdf(U, alpha (f(L + dL) - f(L))) from dL0
/// until the increment drops below eps. Throws SaturationError when a
/// singular transform would be evaluated at or beyond L_max.
FixedPointResult contagion_fixed_point(const Density& candidate, double diffusive_loss,
                                       double loss_before, const ModelParams& params,
                                       const FixedPointOptions& options = {});

struct BlowupEvent {
    std::size_t k;           // time index after the step
    double step_loss;        // total loss over the step
    double contagion_loss;   // part of it produced by the feedback iteration
    bool confirmed = false;  // persisted under dt / 2
    double refined_contagion = 0.0;  // largest dt / 2 contagion within the window
};

struct StepDiagnostics {
    std::size_t k;
    double loss;
    double mass;
    double leaked;
    double sup_norm;
    double diffusive_loss;
    std::size_t fp_iterations;
    bool fp_converged;
};

struct SolverOutput {
    LossPath loss;
    std::vector<std::pair<std::size_t, Density>> snapshots;
    std::vector<BlowupEvent> blowup_events;
    std::vector<StepDiagnostics> diagnostics;
    double leaked_mass_total = 0.0;
    bool saturated = false;
    std::optional<std::size_t> saturation_step;
    std::size_t nonconverged_steps = 0;
    std::optional<Density> final_density;

    std::size_t confirmed_blowups() const;
    bool has_confirmed_blowup() const { return confirmed_blowups() > 0; }
};

/// Quadrature scheme: per step heat_step, contagion_fixed_point and a shift by
/// alpha (f(L + dL) - f(L)). Deterministic given the forcing.
SolverOutput run_density_solver(const ModelParams& params, const InitialCondition& init,
                                const SolverConfig& config, const Forcing& common);

}  // namespace mfsim
