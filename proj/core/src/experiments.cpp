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

#include "mfsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "mfsim/error.hpp"
#include "mfsim/parallel.hpp"
#include "mfsim/particles.hpp"
#include "mfsim/solver.hpp"

namespace mfsim {

double sample_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("sample_quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ConvergenceReport run_coupled(const ExperimentConfig& config, std::vector<std::size_t> n_list,
                              std::size_t n_seeds) {
    if (n_list.empty()) throw ValidationError("n_list: must list at least one N");
    if (n_seeds == 0) throw ValidationError("n_seeds: must be at least 1");
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());

    const ModelParams params = build_params(config);
    const InitialCondition init = build_init(config);
    SolverConfig solver_config = build_solver_config(config);
    // Only the loss path is compared; event confirmation would double the cost.
    solver_config.confirm_blowups = false;
    solver_config.snapshot_every = 0;
    const TimeGrid grid = solver_config.time;
    ParticleRunOptions options;
    options.structural_eps = config.structural_eps;

    std::vector<std::vector<double>> errors(n_list.size(), std::vector<double>(n_seeds));
    parallel_for(n_seeds, config.threads, [&](std::size_t s) {
        const Forcing common = build_forcing(config, s);
        const SolverOutput reference = run_density_solver(params, init, solver_config, common);
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            const ParticleRun run = run_particle_system(params, init, grid, n_list[i], common,
                                                        config.idio_seed + s, options);
            errors[i][s] = sup_distance(run.loss, reference.loss);
        }
    });

    ConvergenceReport report;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        ConvergenceRow row;
        row.n_particles = n_list[i];
        row.n_seeds = n_seeds;
        row.median_error = sample_quantile(errors[i], 0.5);
        row.iqr = sample_quantile(errors[i], 0.75) - sample_quantile(errors[i], 0.25);
        row.errors = std::move(errors[i]);
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "n,n_seeds,median_sup_error,iqr\n";
    for (const auto& row : report.rows) {
        out << fmt::format("{},{},{:.17g},{:.17g}\n", row.n_particles, row.n_seeds,
                           row.median_error, row.iqr);
    }
}

}  // namespace mfsim
