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
#include <vector>

#include "mfsim/config.hpp"

namespace mfsim {

struct ConvergenceRow {
    std::size_t n_particles;
    std::size_t n_seeds;
    double median_error;  // median over seeds of max_k |L^N_k - L_k|
    double iqr;
    std::vector<double> errors;  // per seed, in seed order
};

/// Rows sorted by N.
struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
};

/// Type-7 sample quantile (linear interpolation between order statistics).
double sample_quantile(std::vector<double> values, double p);

/// For seed s = 0..n_seeds-1 draws one common path (common_seed + s), runs
/// the density solver and, on that same path, the particle system for every
/// N in n_list (idio_seed + s). Seeds run in parallel on config.threads.
ConvergenceReport run_coupled(const ExperimentConfig& config, std::vector<std::size_t> n_list,
                              std::size_t n_seeds);

/// CSV `n,n_seeds,median_sup_error,iqr`.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

}  // namespace mfsim
