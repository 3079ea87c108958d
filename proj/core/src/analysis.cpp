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

#include "mfsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mfsim/error.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/numeric.hpp"
#include "mfsim/parallel.hpp"

namespace mfsim {

double curb_time(const ModelParams& params, const TimeGrid& grid) {
    if (params.alpha == 0.0) return 0.0;
    double min_scale = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
        const double t = grid.time(k);
        const double s = params.sigma(t);
        const double r = params.rho(t);
        min_scale = std::min(min_scale, s * s * (1.0 - r * r));
    }
    const double alpha = params.alpha * params.transform.max_slope();
    return alpha * alpha / (2.0 * numeric::kPi * min_scale);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::MustBlowUp: return "MustBlowUp";
        case Verdict::NeverBlowsUp: return "NeverBlowsUp";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

BlowupVerdict static_verdict(const InitialCondition& init, const ModelParams& params,
                             const TimeGrid& grid) {
    BlowupVerdict verdict;
    const double alpha = params.alpha;
    const bool idio = params.idiosyncratic_only(grid);

    if (alpha == 0.0) {
        verdict.value = Verdict::NeverBlowsUp;
        verdict.reason = "no feedback (alpha = 0)";
        verdict.criteria.push_back({"no-feedback", true, true, "alpha = 0"});
        return verdict;
    }

    // f increments lie between min f' and max f' times the loss increment, so
    // the linear-model criteria hold with alpha scaled by those slopes.
    const double alpha_hi = alpha * params.transform.max_slope();
    const double alpha_lo = alpha * params.transform.min_slope();
    const double sup = init.sup_density();
    const double lower = init.support_lower();
    const double upper = init.support_upper();
    const double mean = init.mean();
    const double far = 1.25 * alpha_hi;
    const double near = 0.5 * alpha_lo;
    const double moment = alpha * params.transform.moment_limit();

    const bool density_small = sup < 1.0 / alpha_hi;
    const bool support_far = init.is_dirac() ? lower > far : lower >= far;
    const bool support_near = init.is_dirac() ? upper < near : upper <= near;
    const bool mean_small = mean < moment;

    verdict.criteria = {
        {"density-below-inverse-alpha", idio, idio && density_small,
         fmt::format("sup V0 = {:.6g}, 1/alpha = {:.6g}", sup, 1.0 / alpha_hi)},
        {"support-above-5alpha/4", idio, idio && support_far,
         fmt::format("inf supp = {:.6g}, 5 alpha/4 = {:.6g}", lower, far)},
        {"support-below-alpha/2", idio, idio && support_near,
         fmt::format("sup supp = {:.6g}, alpha/2 = {:.6g}", upper, near)},
        {"mean-below-moment-limit", idio, idio && mean_small,
         fmt::format("m0 = {:.6g}, alpha lim(F + (1 - L) f) = {:.6g}", mean, moment)},
    };
    if (!idio) {
        verdict.reason = "common noise present (rho > 0): support criteria do not apply";
        return verdict;
    }

    const bool never = density_small || support_far;
    const bool must = support_near || mean_small;
    if (never && must) {
        verdict.reason = "criteria disagree (tabulation artefact)";
        return verdict;
    }
    for (const auto& row : verdict.criteria) {
        if (!row.fires) continue;
        verdict.value = never ? Verdict::NeverBlowsUp : Verdict::MustBlowUp;
        verdict.reason = row.name;
        break;
    }
    if (verdict.value == Verdict::Indeterminate) verdict.reason = "no criterion fired";
    return verdict;
}

double moment_rhs(const ModelParams& params, double loss) {
    const auto& f = params.transform;
    const double tail = loss >= 1.0 ? 0.0 : (1.0 - loss) * f.value(loss);
    return params.alpha * (f.antiderivative(loss) + tail);
}

bool moment_criterion(double m0, const ModelParams& params, double loss) {
    return m0 < moment_rhs(params, loss);
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

BlowupProbEstimate estimate_blowup_probability(const ModelParams& params,
                                               const InitialCondition& init,
                                               const SolverConfig& config, std::size_t n_paths,
                                               std::uint64_t base_seed, unsigned threads) {
    if (n_paths == 0) throw ValidationError("paths: must be >= 1");
    auto blew_up = [&](const SolverOutput& out) {
        const bool events = config.confirm_blowups ? out.has_confirmed_blowup()
                                                   : !out.blowup_events.empty();
        return events || out.saturated;
    };

    BlowupProbEstimate estimate;
    estimate.n_paths = n_paths;
    if (params.idiosyncratic_only(config.time)) {
        const SolverOutput out =
            run_density_solver(params, init, config, Forcing::none(config.time));
        estimate.deterministic = true;
        estimate.n_blowups = blew_up(out) ? n_paths : 0;
    } else {
        std::vector<char> hits(n_paths, 0);
        parallel_for(n_paths, threads, [&](std::size_t p) {
            const Forcing common = Forcing::brownian(generate_noise(base_seed + p, config.time));
            hits[p] = blew_up(run_density_solver(params, init, config, common)) ? 1 : 0;
        });
        estimate.n_blowups = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1));
    }
    estimate.p_hat = static_cast<double>(estimate.n_blowups) / static_cast<double>(n_paths);
    std::tie(estimate.lo, estimate.hi) = wilson_interval(estimate.n_blowups, n_paths);
    return estimate;
}

OrderingReport compare_losses(const LossPath& a, const LossPath& b, std::size_t until,
                              double tolerance) {
    if (!(a.grid() == b.grid())) throw ValidationError("compare_losses: loss paths live on different grids");
    if (until > a.last_index() || until > b.last_index()) {
        throw ValidationError(fmt::format("compare_losses: index {} beyond the recorded paths", until));
    }
    OrderingReport report;
    report.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= until; ++k) {
        const double excess = a.value(k) - b.value(k);
        report.max_excess = std::max(report.max_excess, excess);
        if (excess != 0.0) report.identical = false;
        if (excess > tolerance && report.ordered) {
            report.ordered = false;
            report.first_violation = k;
        }
    }
    return report;
}

}  // namespace mfsim
