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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "mfsim/analysis.hpp"
#include "mfsim/config.hpp"
#include "mfsim/error.hpp"
#include "mfsim/experiments.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/numeric.hpp"
#include "mfsim/particles.hpp"
#include "mfsim/solver.hpp"
#include "oracles.hpp"

using namespace mfsim;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.passed) ++failures;
    std::cout << fmt::format("{} [{:2}] {}: {} ({:.1f} s)", out.passed ? "PASS" : "FAIL", id, name, out.detail, secs)
              << std::endl;
}

// Criteria 4-6 share one batch of randomized solver runs.
struct RandomRun {
    ModelParams params;
    SolverConfig config;
    SolverOutput output;
    std::string init;
};

std::vector<RandomRun> random_runs() {
    std::mt19937_64 rng(20240613);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RandomRun> runs;
    for (int r = 0; r < 50; ++r) {
        ModelParams p;
        p.alpha = 0.2 + 1.8 * u(rng);
        p.rho = 0.7 * u(rng);
        InitialCondition init = InitialCondition::dirac(1.0);
        switch (r % 3) {
            case 0: init = InitialCondition::dirac(0.2 + 1.8 * u(rng)); break;
            case 1: {
                const double a = 0.1 + 1.4 * u(rng);
                init = InitialCondition::uniform(a, a + 0.1 + 0.9 * u(rng));
                break;
            }
            default: init = InitialCondition::truncated_gaussian(0.3 + 1.7 * u(rng), 0.1 + 0.4 * u(rng));
        }
        SolverConfig cfg(TimeGrid(2e-3, 500), SpaceGrid(0.01, 7.0));
        const auto forcing = Forcing::brownian(generate_noise(1000 + r, cfg.time));
        runs.push_back({p, cfg, run_density_solver(p, init, cfg, forcing), init.to_string()});
    }
    return runs;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    const double l_exact = oracle::first_passage(1.0, 1.0);

    report(1, "first-passage oracle, density solver", [&] {
        ModelParams p;
        p.alpha = 0.0;
        SolverConfig cfg(TimeGrid(1e-3, 1000), SpaceGrid(1e-3, 8.0));
        const auto out = run_density_solver(p, InitialCondition::dirac(1.0), cfg, Forcing::none(cfg.time));
        const double l = out.loss.final_value();
        return Outcome{std::abs(l - l_exact) < 0.01,
                       fmt::format("L_1 = {:.5f}, 2 Phi(-1) = {:.5f}, |diff| = {:.2e} < 0.01", l, l_exact,
                                   std::abs(l - l_exact))};
    });

    report(2, "first-passage oracle, particle system", [&] {
        ModelParams p;
        p.alpha = 0.0;
        const TimeGrid grid(1e-3, 1000);
        const auto run = run_particle_system(p, InitialCondition::dirac(1.0), grid, 100000, Forcing::none(grid), 1);
        const double l = run.loss.final_value();
        return Outcome{std::abs(l - l_exact) < 0.02,
                       fmt::format("N = 1e5, L^N_1 = {:.5f}, |diff| = {:.2e} < 0.02", l, std::abs(l - l_exact))};
    });

    report(3, "cascade equals the rounds oracle", [&] {
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<std::size_t> un(1, 50);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::size_t mismatches = 0, nontrivial = 0;
        for (int rep = 0; rep < 100000; ++rep) {
            ModelParams p;
            p.alpha = 3.0 * (1.0 - u(rng));  // (0, 3]
            const std::size_t n = un(rng);
            auto state = make_state(std::vector<double>(n));
            for (auto& x : state.positions) x = -0.3 + 2.0 * u(rng);
            for (std::size_t i = 0; i < n; ++i)
                if (u(rng) < 0.2) {
                    state.alive[i] = 0;
                    state.absorbed_count++;
                }
            std::vector<double> alive;
            for (std::size_t i = 0; i < n; ++i)
                if (state.alive[i]) alive.push_back(state.positions[i]);
            const double dn = static_cast<double>(n);
            const std::size_t expected =
                oracle::cascade_rounds(alive, [&](std::size_t k) { return p.alpha * static_cast<double>(k) / dn; });
            const auto got = resolve_cascade(state, p).k_absorbed;
            mismatches += got != expected ? 1 : 0;
            nontrivial += expected > 1 ? 1 : 0;
        }
        return Outcome{mismatches == 0,
                       fmt::format("100000 configurations, {} with k > 1, {} mismatches", nontrivial, mismatches)};
    });

    const auto runs = random_runs();

    report(4, "density sup-norm bound", [&] {
        double worst = -INFINITY;
        std::string where;
        for (const auto& r : runs) {
            for (const auto& d : r.output.diagnostics) {
                const double t = r.config.time.time(d.k);
                const double rho = r.params.rho(t);
                const double bound = 1.0 / std::sqrt(2.0 * numeric::kPi * (1.0 - rho * rho) * t);
                if (d.sup_norm - bound > worst) {
                    worst = d.sup_norm - bound;
                    where = fmt::format("{} at t = {}", r.init, t);
                }
            }
        }
        const double tol = 10.0 * runs.front().config.space.dx();
        return Outcome{worst <= tol,
                       fmt::format("50 runs, max excess = {:.3e} ({}) <= {}", worst, where, tol)};
    });

    report(5, "mass conservation", [&] {
        double worst = 0.0;
        for (const auto& r : runs)
            for (const auto& d : r.output.diagnostics)
                worst = std::max(worst, std::abs(d.loss + d.mass + d.leaked - 1.0));
        const double tol = 10.0 * (runs.front().config.space.dx() + runs.front().config.time.dt());
        return Outcome{worst <= tol, fmt::format("50 runs, max |L + mass + leak - 1| = {:.3e} <= {}", worst, tol)};
    });

    report(6, "no confirmed blow-up after the curb time", [&] {
        std::size_t late = 0, confirmed = 0;
        for (const auto& r : runs) {
            const double curb = curb_time(r.params, r.config.time);
            for (const auto& e : r.output.blowup_events) {
                if (!e.confirmed) continue;
                ++confirmed;
                if (r.config.time.time(e.k) > curb) ++late;
            }
        }
        return Outcome{late == 0, fmt::format("50 runs, {} confirmed events, {} after the curb", confirmed, late)};
    });

    report(7, "deterministic blow-up dichotomy", [&] {
        ModelParams p;
        SolverConfig cfg(TimeGrid(1e-3, 3000), SpaceGrid(0.01, 8.0));
        const auto near = run_density_solver(p, InitialCondition::dirac(0.4), cfg, Forcing::none(cfg.time));
        const auto far = run_density_solver(p, InitialCondition::dirac(2.0), cfg, Forcing::none(cfg.time));
        const bool ok = near.confirmed_blowups() >= 1 && far.confirmed_blowups() == 0;
        return Outcome{ok, fmt::format("x0 = 0.4: {} confirmed, x0 = 2.0: {} confirmed", near.confirmed_blowups(),
                                       far.confirmed_blowups())};
    });

    report(8, "random blow-up is neither sure nor impossible", [&] {
        ModelParams p;
        p.rho = 0.5;
        SolverConfig cfg(TimeGrid(1e-3, 1000), SpaceGrid(0.005, 6.0));
        const auto est = estimate_blowup_probability(p, InitialCondition::dirac(0.4), cfg, 200, 1);
        const bool ok = est.n_blowups > 0 && est.n_blowups < 200;
        return Outcome{ok, fmt::format("{} of {} paths blow up, p = {:.3f} [{:.3f}, {:.3f}]", est.n_blowups,
                                       est.n_paths, est.p_hat, est.lo, est.hi)};
    });

    report(9, "no-crossing under a raised forcing", [&] {
        std::mt19937_64 rng(4242);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst_solver = -INFINITY, worst_particles = -INFINITY;
        std::size_t bad = 0;
        const double dx = 0.01;
        for (int pair = 0; pair < 20; ++pair) {
            const double c = 0.5 * (1.0 - u(rng));  // (0, 0.5]
            const double slope = 1.5 * u(rng), wave = 0.3 * u(rng), period = 0.2 + 0.8 * u(rng);
            const std::function<double(double)> base = [=](double t) { return -slope * t + wave * std::sin(2.0 * numeric::kPi * t / period); };
            ModelParams p;
            p.alpha = 0.3 + 1.2 * u(rng);
            const double a = c + 0.05 + u(rng);
            const auto init = InitialCondition::uniform(a, a + 0.2 + u(rng));
            SolverConfig cfg(TimeGrid(2e-3, 500), SpaceGrid(dx, 7.0));
            const auto low = Forcing::deterministic(cfg.time, base);
            const auto high = Forcing::deterministic(cfg.time, std::function<double(double)>([=](double t) { return base(t) + c; }));

            const auto lo = run_density_solver(p, init, cfg, low);
            const auto hi = run_density_solver(p, init, cfg, high);
            std::size_t until = cfg.time.n_steps();
            for (const auto& e : hi.blowup_events) until = std::min(until, e.k);

            const auto xs = sample_initial_positions(init, 5000, 300 + pair);
            const auto plo = run_particle_system(p, xs, cfg.time, low, 500 + pair);
            const auto phi = run_particle_system(p, xs, cfg.time, high, 500 + pair);
            for (const auto& j : phi.loss.jumps())
                if (j.size > cfg.jump_threshold) until = std::min(until, j.k);

            const auto rs = compare_losses(hi.loss, lo.loss, until, 10.0 * dx);
            const auto rp = compare_losses(phi.loss, plo.loss, until, 10.0 * dx);
            worst_solver = std::max(worst_solver, rs.max_excess);
            worst_particles = std::max(worst_particles, rp.max_excess);
            bad += (rs.ordered ? 0 : 1) + (rp.ordered ? 0 : 1);
        }
        return Outcome{bad == 0, fmt::format("20 pairs, max excess solver {:.3e}, particles {:.3e}, tolerance {}",
                                             worst_solver, worst_particles, 10.0 * dx)};
    });

    report(10, "particle system converges to the solver", [&] {
        const auto c = parse_config("", {{"alpha", "1"}, {"rho", "0.5"}, {"init", "dirac:2"}, {"t_final", "1"},
                                         {"dt", "0.001"}, {"dx", "0.005"}, {"upper", "8"}});
        const auto rep = run_coupled(c, {100, 1000, 10000}, 20);
        bool ok = rep.rows.size() == 3;
        std::string detail = "median sup error";
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            detail += fmt::format(" N={}: {:.4f}", rep.rows[i].n_particles, rep.rows[i].median_error);
            if (i > 0) ok = ok && rep.rows[i].median_error < rep.rows[i - 1].median_error;
        }
        ok = ok && rep.rows.back().median_error < 0.05;
        return Outcome{ok, detail};
    });

    report(11, "singular transform ends in blow-up or saturation", [&] {
        ModelParams p;
        p.alpha = 0.1;
        p.transform = LossTransform::reciprocal(0.9);
        SolverConfig cfg(TimeGrid(0.1, 40000), SpaceGrid(0.1, 600.0));
        const auto out = run_density_solver(p, InitialCondition::dirac(5.0), cfg, Forcing::none(cfg.time));
        const bool ok = out.confirmed_blowups() >= 1 || out.saturated;
        const double reached = out.loss.final_value();
        std::string how = out.saturated ? fmt::format("saturated at t = {}", cfg.time.time(*out.saturation_step))
                                        : "not saturated";
        return Outcome{ok && reached < p.transform.l_max(),
                       fmt::format("L_max = {}, {} confirmed events, {}, last L = {:.4f}",
                                   p.transform.l_max(), out.confirmed_blowups(), how, reached)};
    });

    report(12, "byte-identical outputs on repeat", [&] {
        namespace fs = std::filesystem;
        const fs::path root = fs::current_path() / "acceptance_determinism";
        fs::remove_all(root);
        const std::vector<std::pair<std::string, std::string>> commands = {
            {"simulate-particles",
             "--alpha 1 --rho 0.4 --init uniform:0.3:1.2 --dt 0.005 --dx 0.02 --upper 5 --t-final 0.5 "
             "--n-particles 2000 --snapshot-every 20 --out-loss loss.csv --out-snapshots snap.csv --heatmap map.pgm"},
            {"simulate-density",
             "--alpha 1 --rho 0.4 --init dirac:0.5 --dt 0.002 --dx 0.01 --upper 5 --t-final 0.5 "
             "--snapshot-every 25 --out-loss loss.csv --out-events events.csv --out-diagnostics diag.csv "
             "--out-density density.csv --out-snapshots snap.csv --out-noise noise.csv --heatmap map.pgm"},
            {"coupled",
             "--alpha 1 --rho 0.5 --init dirac:2 --dt 0.005 --dx 0.02 --upper 6 --t-final 0.5 "
             "--n-list 100,400 --n-seeds 4 --threads 2 --out-report report.csv"},
            {"estimate-blowup-prob",
             "--alpha 1 --rho 0.5 --init dirac:0.4 --dt 0.002 --dx 0.01 --upper 5 --t-final 0.3 --paths 6 "
             "--threads 2"},
            {"verdict", "--alpha 1 --init uniform:0.1:0.4"},
            {"verify", "--seed 5 --cases 30 --solver-runs 3 --threads 2"},
        };
        std::size_t files = 0, differing = 0;
        std::string bad;
        // Outputs go to the working directory of each invocation.
        for (const auto& [sub, args] : commands) {
            std::vector<std::vector<std::pair<std::string, std::string>>> listing;
            for (const char* tag : {"a", "b"}) {
                const fs::path dir = root / sub / tag;
                fs::create_directories(dir);
                const std::string cmd = fmt::format("cd '{}' && {} {} {} > stdout.txt 2> stderr.txt", dir.string(),
                                                    MFSIM_CLI, sub, args);
                const int status = std::system(cmd.c_str());
                if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                    bad += fmt::format(" {} exited {}", sub, WEXITSTATUS(status));
                    ++differing;
                }
                std::vector<std::pair<std::string, std::string>> contents;
                for (const auto& entry : fs::directory_iterator(dir)) {
                    if (entry.path().filename() == "stderr.txt") continue;
                    contents.emplace_back(entry.path().filename().string(), slurp(entry.path()));
                }
                std::sort(contents.begin(), contents.end());
                listing.push_back(std::move(contents));
            }
            files += listing[0].size();
            if (listing[0] != listing[1]) {
                ++differing;
                bad += " " + sub;
            }
        }
        return Outcome{differing == 0,
                       fmt::format("6 subcommands, {} files compared{}", files, bad.empty() ? "" : ", differ:" + bad)};
    });

    std::cout << fmt::format("{} of 12 criteria failed", failures) << std::endl;
    return failures == 0 ? 0 : 1;
}
