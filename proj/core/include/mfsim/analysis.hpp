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
#include <optional>
#include <string>
#include <vector>

#include "mfsim/grid.hpp"
#include "mfsim/initial.hpp"
#include "mfsim/jump.hpp"
#include "mfsim/loss_path.hpp"
#include "mfsim/params.hpp"
#include "mfsim/solver.hpp"

namespace mfsim {

/// a^2 / (2 pi min_t sigma(t)^2 (1 - rho(t)^2)) with a = alpha sup f': after
/// this time the density sup-norm bound rules out blow-ups. The minimum runs
/// over the grid. Infinite for singular transforms.
double curb_time(const ModelParams& params, const TimeGrid& grid);

enum class Verdict { MustBlowUp, NeverBlowsUp, Indeterminate };

std::string to_string(Verdict v);

struct CriterionRow {
    std::string name;
    bool applies;   // preconditions hold (e.g. rho == 0)
    bool fires;     // criterion decided the case
    std::string detail;
};

struct BlowupVerdict {
    Verdict value = Verdict::Indeterminate;
    std::string reason;
    std::vector<CriterionRow> criteria;
};

/// Closed-form verdicts for the idiosyncratic (rho == 0) model:
///   NeverBlowsUp  if alpha = 0, sup V_0 < 1/alpha, or support in (5 alpha / 4, inf);
///   MustBlowUp    if support in (0, alpha / 2) or E[X_0] < alpha / 2.
/// For a nonlinear f the never-criteria use alpha sup f', the support
/// criterion alpha inf f', and the mean criterion alpha lim (F + (1 - L) f)
/// as L -> 1 (alpha / 2 for the linear loss). Anything else, and any rho > 0
/// configuration, is Indeterminate.
BlowupVerdict static_verdict(const InitialCondition& init, const ModelParams& params,
                             const TimeGrid& grid);

/// alpha (F(L) + (1 - L) f(L)).
double moment_rhs(const ModelParams& params, double loss);

/// m0 < alpha (F(L) + (1 - L) f(L)): a blow-up must have happened by the
/// time the loss reaches L (idiosyncratic model). Throws DomainError outside
/// the transform's domain.
bool moment_criterion(double m0, const ModelParams& params, double loss);

struct BlowupProbEstimate {
    std::size_t n_paths = 0;
    std::size_t n_blowups = 0;
    double p_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    /// rho == 0: one run decided the answer for every path.
    bool deterministic = false;
};

/// Wilson score interval for k successes out of n at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// Runs the solver on common-noise seeds base_seed + p, p = 0..n_paths-1, and
/// counts paths with at least one confirmed blow-up. With rho == 0 the
/// answer is deterministic and taken from a single run.
BlowupProbEstimate estimate_blowup_probability(const ModelParams& params,
                                               const InitialCondition& init,
                                               const SolverConfig& config, std::size_t n_paths,
                                               std::uint64_t base_seed, unsigned threads = 0);

struct OrderingReport {
    bool ordered = true;
    bool identical = true;
    std::optional<std::size_t> first_violation;
    double max_excess = 0.0;  // max_k (a_k - b_k), may be negative
};

/// Checks a_k <= b_k + tolerance for k = 0..until. Throws ValidationError on
/// grid mismatch or an index beyond either record.
OrderingReport compare_losses(const LossPath& a, const LossPath& b, std::size_t until,
                              double tolerance = 0.0);

}  // namespace mfsim
