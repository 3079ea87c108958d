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

#include "mfsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "mfsim/analysis.hpp"
#include "mfsim/density.hpp"
#include "mfsim/error.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/numeric.hpp"
#include "mfsim/parallel.hpp"
#include "mfsim/particles.hpp"
#include "mfsim/solver.hpp"

namespace mfsim {
namespace {

using Rng = std::mt19937_64;

double draw(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t draw_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void fail(VerifyCheck& check, const std::string& what) {
    if (check.passed) check.detail = what;
    check.passed = false;
}

LossTransform draw_transform(Rng& rng) {
    switch (draw_int(rng, 0, 2)) {
        case 0: return LossTransform::linear();
        case 1: return LossTransform::neg_log();
        default: return LossTransform::reciprocal();
    }
}

// Sum of a few Gaussian bumps, negligible at the upper node.
Density smooth_density(Rng& rng, const SpaceGrid& grid) {
    std::vector<double> values(grid.n_points(), 0.0);
    const std::size_t bumps = draw_int(rng, 1, 3);
    for (std::size_t b = 0; b < bumps; ++b) {
        const double centre = draw(rng, 0.3, 0.5) * grid.upper();
        const double width = draw(rng, 0.03, 0.07) * grid.upper();
        const double weight = draw(rng, 0.2, 1.0);
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double z = (grid.x(j) - centre) / width;
            values[j] += weight * std::exp(-0.5 * z * z);
        }
    }
    return Density(grid, std::move(values));
}

Density rough_density(Rng& rng, const SpaceGrid& grid) {
    std::vector<double> values(grid.n_points());
    for (auto& v : values) v = draw_int(rng, 0, 3) == 0 ? 0.0 : draw(rng, 0.0, 2.0);
    values.back() = 0.0;  // truncated densities vanish at the upper node
    return Density(grid, std::move(values));
}

VerifyCheck check_cdf_monotone(Rng& rng, std::size_t cases) {
    VerifyCheck check{"density.cdf_monotone", true, cases, {}};
    for (std::size_t c = 0; c < cases; ++c) {
        const SpaceGrid grid(draw(rng, 0.01, 0.2), draw(rng, 1.0, 5.0));
        const Density d = rough_density(rng, grid);
        std::vector<double> xs(64);
        for (auto& x : xs) x = draw(rng, -0.5, grid.upper() + 0.5);
        std::sort(xs.begin(), xs.end());
        double prev = -1.0;
        for (double x : xs) {
            const double value = cdf(d, x);
            if (value < prev) fail(check, fmt::format("case {}: cdf decreases at x = {}", c, x));
            prev = value;
        }
    }
    return check;
}

VerifyCheck check_shift_properties(Rng& rng, std::size_t cases, VerifyCheck& mass_check) {
    VerifyCheck check{"density.shift_composition", true, cases, {}};
    mass_check = {"density.shift_mass", true, cases, {}};
    for (std::size_t c = 0; c < cases; ++c) {
        const SpaceGrid grid(draw(rng, 0.005, 0.05), draw(rng, 3.0, 6.0));
        const Density d = smooth_density(rng, grid);
        const double a = draw(rng, 0.0, 0.5);
        const double b = draw(rng, 0.0, 0.5);
        // Interpolation tolerance from the discrete curvature of V.
        double curvature = 0.0;
        for (std::size_t j = 1; j + 1 < d.size(); ++j) {
            curvature = std::max(curvature,
                                 std::abs(d.value(j + 1) - 2.0 * d.value(j) + d.value(j - 1)));
        }
        const double tol = curvature / 4.0 + 1e-14;
        const Density twice = shift_density(shift_density(d, a), b);
        const Density once = shift_density(d, a + b);
        double diff = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            diff = std::max(diff, std::abs(twice.value(j) - once.value(j)));
        }
        if (diff > 2.0 * tol) {
            fail(check, fmt::format("case {}: |shift(shift(V,{}),{}) - shift(V,{})| = {} > {}", c,
                                    a, b, a + b, diff, 2.0 * tol));
        }
        const Density rough = rough_density(rng, grid);
        const double before = total_mass(rough);
        const double after = total_mass(shift_density(rough, a));
        if (after > before * (1.0 + 1e-12) + 1e-14) {
            fail(mass_check, fmt::format("case {}: mass grows {} -> {} under shift {}", c, before,
                                         after, a));
        }
    }
    return check;
}

VerifyCheck check_cascade_oracle(Rng& rng, std::size_t cases) {
    VerifyCheck check{"particles.cascade_oracle", true, cases, {}};
    for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t n_total = draw_int(rng, 1, 50);
        const std::size_t dead = draw_int(rng, 0, n_total - 1);
        ModelParams params;
        params.alpha = draw(rng, 0.0, 3.0);
        params.transform = draw_transform(rng);
        const double loss = static_cast<double>(dead) / static_cast<double>(n_total);
        if (params.transform.singular() && loss >= params.transform.l_max()) continue;
        std::vector<double> alive(n_total - dead);
        const double spread = draw(rng, 0.05, 2.0);
        for (auto& x : alive) x = draw(rng, -0.2, spread);
        std::optional<std::size_t> fast;
        try {
            fast = cascade_size(alive, n_total, loss, params).k_absorbed;
        } catch (const SaturationError&) {
        }
        const auto slow = cascade_by_rounds(alive, n_total, loss, params);
        if (fast != slow) {
            fail(check, fmt::format("case {}: N = {}, L = {}, alpha = {}, {}: window {} vs rounds {}",
                                    c, n_total, loss, params.alpha, params.transform.name(),
                                    fast ? fmt::format("{}", *fast) : "saturated",
                                    slow ? fmt::format("{}", *slow) : "saturated"));
        }
    }
    return check;
}

VerifyCheck check_particle_lattice(Rng& rng, std::size_t cases) {
    VerifyCheck check{"particles.loss_lattice", true, cases, {}};
    for (std::size_t c = 0; c < cases; ++c) {
        ModelParams params;
        params.alpha = draw(rng, 0.0, 2.0);
        params.rho = draw_int(rng, 0, 1) ? 0.0 : draw(rng, 0.0, 0.6);
        params.transform = draw_int(rng, 0, 1) ? LossTransform::linear() : LossTransform::neg_log();
        const std::size_t n = draw_int(rng, 5, 120);
        const double a = draw(rng, 0.05, 1.0);
        const InitialCondition init = InitialCondition::uniform(a, a + draw(rng, 0.1, 1.0));
        const TimeGrid grid(0.01, 40);
        ParticleRunOptions options;
        options.snapshot_every = 1;
        const ParticleRun run = run_particle_system(params, init, grid, n, Forcing::brownian(
                                    generate_noise(c + 1, grid)), c + 1000, options);
        const auto& values = run.loss.values();
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double scaled = values[k] * static_cast<double>(n);
            if (std::abs(scaled - std::round(scaled)) > 1e-9) {
                fail(check, fmt::format("case {}: L_{} = {} is not a multiple of 1/{}", c, k,
                                        values[k], n));
            }
            if (k > 0 && values[k] < values[k - 1]) {
                fail(check, fmt::format("case {}: L decreases at step {}", c, k));
            }
        }
        for (std::size_t s = 1; s < run.snapshots.size(); ++s) {
            const auto& prev = run.snapshots[s - 1];
            const auto& next = run.snapshots[s];
            if (next.absorbed_count < prev.absorbed_count) {
                fail(check, fmt::format("case {}: absorbed count decreases at step {}", c, next.k));
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!prev.alive[i] && (next.alive[i] || next.positions[i] != prev.positions[i])) {
                    fail(check, fmt::format("case {}: dead particle {} changed at step {}", c, i,
                                            next.k));
                }
            }
        }
    }
    return check;
}

VerifyCheck check_noise_replay(std::uint64_t seed) {
    VerifyCheck check{"stochastic.noise_replay", true, 1, {}};
    const TimeGrid grid(0.01, 50);
    const NoisePath original = generate_noise(seed, grid);
    std::stringstream csv;
    write_noise_csv(csv, original);
    const NoisePath replayed = read_noise_csv(csv, grid);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        if (original.increment(k) != replayed.increment(k)) {
            fail(check, fmt::format("increment {} differs after CSV round trip", k));
        }
    }
    ModelParams params;
    params.alpha = 0.8;
    params.rho = 0.5;
    const InitialCondition init = InitialCondition::uniform(0.5, 1.5);
    SolverConfig config(grid, SpaceGrid(0.02, 5.0));
    const auto a = run_density_solver(params, init, config, Forcing::brownian(original));
    const auto b = run_density_solver(params, init, config, Forcing::brownian(replayed));
    if (a.loss.values() != b.loss.values()) fail(check, "solver loss differs under replay");
    const auto pa = run_particle_system(params, init, grid, 200, Forcing::brownian(original), 7);
    const auto pb = run_particle_system(params, init, grid, 200, Forcing::brownian(replayed), 7);
    if (pa.loss.values() != pb.loss.values()) fail(check, "particle loss differs under replay");
    return check;
}

struct SolverCase {
    ModelParams params;
    InitialCondition init = InitialCondition::dirac(1.0);
    std::uint64_t seed = 0;
};

void check_solver_runs(Rng& rng, std::size_t runs, unsigned threads, VerifyCheck& conservation,
                       VerifyCheck& sup_decay, VerifyCheck& curb) {
    conservation = {"density_solver.conservation", true, runs, {}};
    sup_decay = {"density_solver.sup_norm_decay", true, runs, {}};
    curb = {"density_solver.no_late_blowups", true, runs, {}};
    std::vector<SolverCase> cases(runs);
    for (auto& sc : cases) {
        sc.params.alpha = draw(rng, 0.0, 1.5);
        sc.params.rho = draw_int(rng, 0, 1) ? 0.0 : draw(rng, 0.0, 0.6);
        sc.params.transform = draw_int(rng, 0, 1) ? LossTransform::linear()
                                                  : LossTransform::neg_log();
        if (draw_int(rng, 0, 2) == 0) {
            sc.init = InitialCondition::dirac(draw(rng, 0.3, 2.0));
        } else {
            const double a = draw(rng, 0.2, 1.5);
            sc.init = InitialCondition::uniform(a, a + draw(rng, 0.1, 1.0));
        }
        sc.seed = rng();
    }
    const TimeGrid grid(0.002, 500);
    const SpaceGrid space(0.01, 7.0);
    const double dt = grid.dt();
    std::vector<std::string> conservation_fail(runs), sup_fail(runs), curb_fail(runs);
    parallel_for(runs, threads, [&](std::size_t r) {
        const SolverCase& sc = cases[r];
        SolverConfig config(grid, space);
        const auto out = run_density_solver(sc.params, sc.init, config,
                                            Forcing::brownian(generate_noise(sc.seed, grid)));
        const double idio = 1.0 - std::pow(sc.params.rho(0.0), 2);
        const double sup0 =
            sc.init.is_dirac() ? sc.init.sup_density() : sup_norm(sc.init.tabulate(space));
        for (const auto& d : out.diagnostics) {
            const double balance = d.loss + d.mass + d.leaked - 1.0;
            if (std::abs(balance) > 10.0 * (space.dx() + dt) && conservation_fail[r].empty()) {
                conservation_fail[r] = fmt::format("run {}: step {} balance off by {}", r, d.k, balance);
            }
            const double t = grid.time(d.k);
            const double bound = std::min(sup0, 1.0 / std::sqrt(2.0 * numeric::kPi * idio * t));
            if (d.sup_norm > bound * (1.0 + 1e-2) + 1e-6 && sup_fail[r].empty()) {
                sup_fail[r] = fmt::format("run {}: step {} sup {} exceeds {}", r, d.k, d.sup_norm, bound);
            }
        }
        const double t_curb = curb_time(sc.params, grid);
        for (const auto& e : out.blowup_events) {
            if (e.confirmed && grid.time(e.k) > t_curb && curb_fail[r].empty()) {
                curb_fail[r] = fmt::format(
                    "run {}: event at t = {} after curb {} (alpha = {}, rho = {}, {}, init {}, "
                    "seed {}, contagion {})",
                    r, grid.time(e.k), t_curb, sc.params.alpha, sc.params.rho(0.0),
                    sc.params.transform.name(), sc.init.to_string(), sc.seed, e.contagion_loss);
            }
        }
    });
    for (std::size_t r = 0; r < runs; ++r) {
        if (!conservation_fail[r].empty()) fail(conservation, conservation_fail[r]);
        if (!sup_fail[r].empty()) fail(sup_decay, sup_fail[r]);
        if (!curb_fail[r].empty()) fail(curb, curb_fail[r]);
    }
}

VerifyCheck check_fixed_point(Rng& rng, std::size_t cases) {
    VerifyCheck check{"density_solver.fixed_point", true, cases, {}};
    const SpaceGrid grid(0.01, 4.0);
    for (std::size_t c = 0; c < cases; ++c) {
        Density u = smooth_density(rng, grid);
        const double scale = 0.8 / std::max(sup_norm(u), 1e-300);
        std::vector<double> values(u.values().begin(), u.values().end());
        for (auto& v : values) v *= draw(rng, 0.1, 1.0) * scale;
        u = Density(grid, std::move(values));
        ModelParams params;
        params.alpha = draw(rng, 0.0, 1.0);
        const double loss = draw(rng, 0.0, 0.3);
        const double dl0 = draw(rng, 0.0, 0.02);
        FixedPointOptions opts;
        opts.eps = 1e-8;
        opts.record_iterates = true;
        const auto coarse = contagion_fixed_point(u, dl0, loss, params, opts);
        for (std::size_t i = 1; i < coarse.iterates.size(); ++i) {
            if (coarse.iterates[i] < coarse.iterates[i - 1]) {
                fail(check, fmt::format("case {}: iterate {} decreases", c, i));
            }
        }
        opts.eps = 1e-12;
        opts.record_iterates = false;
        const auto fine = contagion_fixed_point(u, dl0, loss, params, opts);
        // Contraction factor is at most alpha sup U <= 0.8, so the gap is below 4 eps.
        if (std::abs(fine.step_loss - coarse.step_loss) > 5e-8) {
            fail(check, fmt::format("case {}: eps refinement moved the limit by {}", c,
                                    fine.step_loss - coarse.step_loss));
        }
    }
    return check;
}

VerifyCheck check_moment_monotone(Rng& rng, std::size_t cases) {
    VerifyCheck check{"analysis.moment_monotone", true, cases, {}};
    for (std::size_t c = 0; c < cases; ++c) {
        ModelParams params;
        params.alpha = draw(rng, 0.0, 3.0);
        const double loss = draw(rng, 0.0, 1.0);
        const double m0 = draw(rng, 0.0, 2.0);
        if (!moment_criterion(m0, params, loss)) continue;
        const double smaller = m0 * draw(rng, 0.0, 1.0);
        if (!moment_criterion(smaller, params, loss)) {
            fail(check, fmt::format("case {}: fires at m0 = {} but not at {}", c, m0, smaller));
        }
        ModelParams larger = params;
        larger.alpha = params.alpha * draw(rng, 1.0, 2.0);
        if (!moment_criterion(m0, larger, loss)) {
            fail(check, fmt::format("case {}: fires at alpha = {} but not at {}", c, params.alpha,
                                    larger.alpha));
        }
    }
    return check;
}

VerifyCheck check_verdicts(Rng& rng, std::size_t runs, unsigned threads) {
    VerifyCheck check{"analysis.verdict_consistency", true, 0, {}};
    struct Case {
        ModelParams params;
        InitialCondition init;
        Verdict verdict;
    };
    std::vector<Case> decided;
    std::size_t attempts = 0;
    while (decided.size() < runs && attempts < 100 * runs) {
        ++attempts;
        ModelParams params;
        params.alpha = draw(rng, 0.8, 2.0);
        double a = 0.0;
        double b = 0.0;
        // Every law spans several cells of the dx = 0.01 grid used below.
        switch (draw_int(rng, 0, 2)) {
            case 0:  // entirely below alpha / 2
                b = draw(rng, 0.3, 0.5) * params.alpha;
                a = b * draw(rng, 0.1, 0.7);
                break;
            case 1:  // entirely above 5 alpha / 4
                a = 1.25 * params.alpha + draw(rng, 0.05, 1.0);
                b = a + draw(rng, 0.1, 1.0);
                break;
            default:  // spread out
                a = draw(rng, 0.05, 1.0);
                b = a + draw(rng, 0.5, 3.0);
                break;
        }
        const InitialCondition init = InitialCondition::uniform(a, b);
        const TimeGrid probe(0.002, 1);
        const auto verdict = static_verdict(init, params, probe);
        if (verdict.value == Verdict::Indeterminate) continue;
        decided.push_back({params, init, verdict.value});
    }
    check.cases = decided.size();
    std::vector<std::string> failures(decided.size());
    parallel_for(decided.size(), threads, [&](std::size_t r) {
        const Case& c = decided[r];
        const double horizon = c.params.alpha * c.params.alpha / (2.0 * numeric::kPi) + 0.1;
        const TimeGrid grid = TimeGrid::from_horizon(0.002, horizon);
        SolverConfig config(grid, SpaceGrid(0.01, c.init.support_upper() + 4.0));
        const auto out = run_density_solver(c.params, c.init, config, Forcing::none(grid));
        const bool blew_up = !out.blowup_events.empty() || out.saturated;
        if ((c.verdict == Verdict::MustBlowUp) != blew_up) {
            failures[r] = fmt::format("alpha = {}, init {}: verdict {} but solver {}",
                                      c.params.alpha, c.init.to_string(), to_string(c.verdict),
                                      blew_up ? "blew up" : "did not blow up");
        }
    });
    for (const auto& f : failures) {
        if (!f.empty()) fail(check, f);
    }
    return check;
}

}  // namespace

std::optional<std::size_t> cascade_by_rounds(std::span<const double> alive_positions,
                                             std::size_t n_total, double loss_before,
                                             const ModelParams& params) {
    const auto& f = params.transform;
    std::size_t m = 0;
    while (true) {
        double shift = 0.0;
        if (m > 0) {
            const double after = loss_before + static_cast<double>(m) / static_cast<double>(n_total);
            shift = f.singular() && after >= f.l_max()
                        ? std::numeric_limits<double>::infinity()
                        : params.alpha * (f.value(after) - f.value(loss_before));
        }
        const auto count = static_cast<std::size_t>(std::count_if(
            alive_positions.begin(), alive_positions.end(), [&](double x) { return x <= shift; }));
        if (count == m) {
            if (std::isinf(shift)) return std::nullopt;
            return m;
        }
        m = count;
    }
}

std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& options) {
    Rng rng(options.seed);
    std::vector<VerifyCheck> checks;
    checks.push_back(check_cdf_monotone(rng, options.cases));
    VerifyCheck mass;
    checks.push_back(check_shift_properties(rng, options.cases, mass));
    checks.push_back(mass);
    checks.push_back(check_cascade_oracle(rng, options.cases * 10));
    checks.push_back(check_particle_lattice(rng, std::max<std::size_t>(options.cases / 10, 1)));
    checks.push_back(check_noise_replay(options.seed));
    VerifyCheck conservation, sup_decay, curb;
    check_solver_runs(rng, options.solver_runs, options.threads, conservation, sup_decay, curb);
    checks.push_back(conservation);
    checks.push_back(sup_decay);
    checks.push_back(curb);
    checks.push_back(check_fixed_point(rng, options.cases));
    checks.push_back(check_moment_monotone(rng, options.cases));
    checks.push_back(check_verdicts(rng, options.solver_runs, options.threads));
    return checks;
}

void write_verify_csv(std::ostream& out, const std::vector<VerifyCheck>& checks) {
    out << "check,status,cases,detail\n";
    for (const auto& c : checks) {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        out << fmt::format("{},{},{},{}\n", c.name, c.passed ? "PASS" : "FAIL", c.cases, detail);
    }
}

}  // namespace mfsim
