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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfsim/grid.hpp"
#include "mfsim/initial.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/params.hpp"
#include "mfsim/solver.hpp"

namespace mfsim {

/// Flat experiment description. Every field has a key in the `key = value`
/// file format (see config_keys()); command line flags use the same names
/// with '-' for '_'.
struct ExperimentConfig {
    std::string mode = "density";  // particles | density | coupled | blowup-prob | verdict

    // model
    double alpha = 1.0;
    double rho = 0.0;
    double sigma = 1.0;
    std::string drift = "zero";
    std::string transform = "linear";
    double l_max = LossTransform::kDefaultLMax;
    double structural_eps = ModelParams::kDefaultStructuralEps;
    std::string init = "dirac:1";
    /// brownian | zero | ramp:<start>:<slope>
    std::string forcing = "brownian";

    // grids
    double dt = 1e-3;
    double t_final = 1.0;
    double dx = 1e-3;
    double upper = 8.0;

    // solver
    double fp_eps = 1e-10;
    std::size_t fp_max_iter = 100000;
    double jump_threshold = 0.05;
    bool image_kernel = false;
    double kernel_width = 8.0;
    bool confirm_blowups = true;
    double confirm_window = 0.05;
    double confirm_ratio = 0.85;
    std::size_t snapshot_every = 0;

    // particles / Monte Carlo
    std::size_t n_particles = 10000;
    std::uint64_t common_seed = 1;
    std::uint64_t idio_seed = 2;
    std::size_t paths = 100;
    std::uint64_t base_seed = 1;
    std::vector<std::size_t> n_list = {100, 1000, 10000};
    std::size_t n_seeds = 20;
    unsigned threads = 0;

    // outputs
    std::string out_loss;
    std::string out_snapshots;
    std::string out_density;
    std::string out_events;
    std::string out_diagnostics;
    std::string out_noise;
    std::string out_report;
    std::string common_noise;  // replay a stored `k,increment` file
    std::string heatmap;
};

/// Names of all accepted keys, sorted.
std::vector<std::string> config_keys();

/// Parses `key = value` lines ('#' starts a comment), then applies
/// `overrides` in order. Unknown keys, malformed values and violations of
/// the structural bounds raise ValidationError naming the key.
ExperimentConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Normalised dump: every key, sorted, doubles with 17 significant digits.
/// parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& config);

/// Full semantic validation (builds every derived object once).
void validate_config(const ExperimentConfig& config);

TimeGrid build_time_grid(const ExperimentConfig& config);
SpaceGrid build_space_grid(const ExperimentConfig& config);
ModelParams build_params(const ExperimentConfig& config);
InitialCondition build_init(const ExperimentConfig& config);
SolverConfig build_solver_config(const ExperimentConfig& config);
/// Common forcing for seed `common_seed + seed_offset` (or the replay file).
Forcing build_forcing(const ExperimentConfig& config, std::uint64_t seed_offset = 0);

}  // namespace mfsim
