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

// mfsim: command line front end.
//
// Every configuration key is also a flag (`n_particles` -> `--n-particles`);
// flags override a `--config` file. Exit status: 0 ok, 1 invalid input,
// 2 runtime or numerical failure (including cascade saturation).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mfsim/analysis.hpp"
#include "mfsim/config.hpp"
#include "mfsim/error.hpp"
#include "mfsim/experiments.hpp"
#include "mfsim/heatmap.hpp"
#include "mfsim/particles.hpp"
#include "mfsim/solver.hpp"
#include "mfsim/verify.hpp"

namespace {

using namespace mfsim;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    return out;
}

// Flags and config file shared by the simulation subcommands.
struct ConfigFlags {
    std::string mode;
    std::string config_path;
    bool dump = false;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    ConfigFlags(CLI::App* sub, std::string mode_name) : mode(std::move(mode_name)) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_flag("--dump-config", dump, "print the normalised configuration and exit");
        for (const auto& key : config_keys()) {
            if (key == "mode") continue;
            auto& slot = values[key];
            if (key == "image_kernel" || key == "confirm_blowups") {
                options[key] = sub->add_option(flag_name(key), slot, key)
                                   ->expected(0, 1)
                                   ->default_str("true");
            } else {
                options[key] = sub->add_option(flag_name(key), slot, key);
            }
        }
    }

    ExperimentConfig resolve() const {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ValidationError(fmt::format("config: cannot open '{}'", config_path));
            std::stringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        std::vector<std::pair<std::string, std::string>> overrides{{"mode", mode}};
        for (const auto& [key, option] : options) {
            if (option->count() > 0) overrides.emplace_back(key, values.at(key));
        }
        return parse_config(text, overrides);
    }
};

void write_common_noise(const ExperimentConfig& config, const Forcing& common) {
    if (config.out_noise.empty()) return;
    const auto* brownian = std::get_if<Forcing::BrownianScaled>(&common.variant());
    if (!brownian) throw ValidationError("out_noise: only a brownian forcing has a noise path");
    auto out = open_output(config.out_noise);
    write_noise_csv(out, brownian->noise);
}

int saturation_exit(bool saturated, const std::string& what) {
    if (!saturated) return kExitOk;
    std::cerr << "mfsim: " << what << " saturated: the loss reached the transform cap\n";
    return kExitRuntime;
}

int simulate_particles(const ExperimentConfig& config) {
    const ModelParams params = build_params(config);
    const InitialCondition init = build_init(config);
    const TimeGrid grid = build_time_grid(config);
    const Forcing common = build_forcing(config);
    ParticleRunOptions options;
    options.snapshot_every = config.snapshot_every;
    options.structural_eps = config.structural_eps;
    if (!config.heatmap.empty() && options.snapshot_every == 0) options.snapshot_every = 1;

    const ParticleRun run = run_particle_system(params, init, grid, config.n_particles, common,
                                                config.idio_seed, options);
    write_common_noise(config, common);
    if (!config.out_loss.empty()) {
        auto out = open_output(config.out_loss);
        write_loss_csv(out, run.loss);
    }
    if (!config.out_snapshots.empty()) {
        auto out = open_output(config.out_snapshots);
        out << "t_index,t,particle,position,alive\n";
        for (const auto& s : run.snapshots) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                out << fmt::format("{},{:.17g},{},{:.17g},{}\n", s.k, grid.time(s.k), i,
                                   s.positions[i], static_cast<int>(s.alive[i]));
            }
        }
    }
    if (!config.heatmap.empty()) {
        const SpaceGrid space = build_space_grid(config);
        std::vector<std::pair<std::size_t, Density>> columns;
        for (const auto& s : run.snapshots) columns.emplace_back(s.k, empirical_density(s, space));
        emit_heatmap(columns, config.heatmap);
    }
    double max_jump = 0.0;
    for (const auto& j : run.loss.jumps()) max_jump = std::max(max_jump, j.size);
    std::cout << "n_particles,final_loss,n_jumps,max_jump,saturated\n"
              << fmt::format("{},{:.17g},{},{:.17g},{}\n", config.n_particles,
                             run.loss.final_value(), run.loss.jumps().size(), max_jump,
                             static_cast<int>(run.saturated));
    return saturation_exit(run.saturated, "particle system");
}

int simulate_density(const ExperimentConfig& config) {
    const ModelParams params = build_params(config);
    const InitialCondition init = build_init(config);
    SolverConfig solver = build_solver_config(config);
    if (!config.heatmap.empty() && solver.snapshot_every == 0) solver.snapshot_every = 1;
    const Forcing common = build_forcing(config);
    const TimeGrid& grid = solver.time;

    const SolverOutput out = run_density_solver(params, init, solver, common);
    write_common_noise(config, common);
    if (!config.out_loss.empty()) {
        auto f = open_output(config.out_loss);
        write_loss_csv(f, out.loss);
    }
    if (!config.out_events.empty()) {
        auto f = open_output(config.out_events);
        f << "t_index,t,step_loss,contagion_loss,refined_contagion,confirmed\n";
        for (const auto& e : out.blowup_events) {
            f << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", e.k, grid.time(e.k),
                             e.step_loss, e.contagion_loss, e.refined_contagion,
                             static_cast<int>(e.confirmed));
        }
    }
    if (!config.out_diagnostics.empty()) {
        auto f = open_output(config.out_diagnostics);
        f << "t_index,t,L,mass,leaked,sup_norm,diffusive_loss,fp_iterations,fp_converged\n";
        for (const auto& d : out.diagnostics) {
            f << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", d.k,
                             grid.time(d.k), d.loss, d.mass, d.leaked, d.sup_norm,
                             d.diffusive_loss, d.fp_iterations, static_cast<int>(d.fp_converged));
        }
    }
    if (!config.out_density.empty() && out.final_density) {
        auto f = open_output(config.out_density);
        write_density_csv(f, *out.final_density);
    }
    if (!config.out_snapshots.empty()) {
        auto f = open_output(config.out_snapshots);
        f << "t_index,t,x,value\n";
        for (const auto& [k, d] : out.snapshots) {
            for (std::size_t j = 0; j < d.size(); ++j) {
                f << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", k, grid.time(k), d.grid().x(j),
                                 d.value(j));
            }
        }
    }
    if (!config.heatmap.empty()) {
        if (out.snapshots.empty()) throw std::runtime_error("heatmap: no snapshots were recorded");
        emit_heatmap(out.snapshots, config.heatmap);
    }
    const double mass = out.final_density ? total_mass(*out.final_density) : 0.0;
    std::cout << "final_loss,mass,leaked,blowup_events,confirmed_blowups,saturated,"
                 "nonconverged_steps\n"
              << fmt::format("{:.17g},{:.17g},{:.17g},{},{},{},{}\n", out.loss.final_value(), mass,
                             out.leaked_mass_total, out.blowup_events.size(),
                             out.confirmed_blowups(), static_cast<int>(out.saturated),
                             out.nonconverged_steps);
    return saturation_exit(out.saturated, "density solver");
}

int coupled(const ExperimentConfig& config) {
    const ConvergenceReport report = run_coupled(config, config.n_list, config.n_seeds);
    write_convergence_csv(std::cout, report);
    if (!config.out_report.empty()) {
        auto f = open_output(config.out_report);
        write_convergence_csv(f, report);
    }
    return kExitOk;
}

int blowup_probability(const ExperimentConfig& config) {
    const auto est = estimate_blowup_probability(build_params(config), build_init(config),
                                                 build_solver_config(config), config.paths,
                                                 config.base_seed, config.threads);
    std::cout << "n_paths,n_blowups,p_hat,ci_lo,ci_hi,deterministic\n"
              << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{}\n", est.n_paths, est.n_blowups,
                             est.p_hat, est.lo, est.hi, static_cast<int>(est.deterministic));
    return kExitOk;
}

int verdict(const ExperimentConfig& config) {
    const ModelParams params = build_params(config);
    const TimeGrid grid = build_time_grid(config);
    const BlowupVerdict v = static_verdict(build_init(config), params, grid);
    std::cout << "criterion,applies,fires,detail\n";
    for (const auto& row : v.criteria) {
        std::cout << csv_field(row.name) << ',' << static_cast<int>(row.applies) << ','
                  << static_cast<int>(row.fires) << ',' << csv_field(row.detail) << '\n';
    }
    std::cout << "curb_time,1,0," << fmt::format("{:.17g}", curb_time(params, grid)) << '\n';
    std::cout << "verdict,1,1," << csv_field(to_string(v.value) + ": " + v.reason) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional McKean-Vlasov loss simulator with common noise"};
    app.require_subcommand(1);

    struct Entry {
        CLI::App* sub;
        std::unique_ptr<ConfigFlags> flags;
        int (*run)(const ExperimentConfig&);
    };
    std::vector<Entry> entries;
    auto add = [&](const char* name, const char* help, const char* mode,
                   int (*run)(const ExperimentConfig&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        entries.push_back({sub, std::make_unique<ConfigFlags>(sub, mode), run});
    };
    add("simulate-particles", "run the N-particle system", "particles", simulate_particles);
    add("simulate-density", "run the density solver", "density", simulate_density);
    add("coupled", "particle vs density convergence on shared common noise", "coupled", coupled);
    add("estimate-blowup-prob", "Monte Carlo blow-up probability with Wilson interval",
        "blowup-prob", blowup_probability);
    add("verdict", "closed-form blow-up criteria table", "verdict", verdict);

    VerifyOptions verify_options;
    CLI::App* verify = app.add_subcommand("verify", "run the randomized invariant suites");
    verify->add_option("--seed", verify_options.seed, "suite seed");
    verify->add_option("--cases", verify_options.cases, "random cases per cheap suite");
    verify->add_option("--solver-runs", verify_options.solver_runs, "random solver runs");
    verify->add_option("--threads", verify_options.threads, "worker threads (0: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (verify->parsed()) {
            const auto checks = run_verify_suite(verify_options);
            write_verify_csv(std::cout, checks);
            const bool ok = std::all_of(checks.begin(), checks.end(),
                                        [](const VerifyCheck& c) { return c.passed; });
            return ok ? kExitOk : kExitRuntime;
        }
        for (const auto& entry : entries) {
            if (!entry.sub->parsed()) continue;
            const ExperimentConfig config = entry.flags->resolve();
            if (entry.flags->dump) {
                std::cout << dump_config(config);
                return kExitOk;
            }
            return entry.run(config);
        }
    } catch (const ValidationError& e) {
        std::cerr << "mfsim: invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "mfsim: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}
