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

#include "mfsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mfsim/error.hpp"

namespace mfsim {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
    throw ValidationError(fmt::format("{}: cannot parse '{}' as {}", key, value, what));
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) bad_value(key, value, "a number");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
        bad_value(key, value, "a nonnegative integer");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value, "a boolean");
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(static_cast<std::size_t>(to_u64(key, trim(item))));
    }
    return out;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }
std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct Field {
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field number_field(T ExperimentConfig::*member) {
    Field f;
    if constexpr (std::is_same_v<T, double>) {
        f.set = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*member = to_double(k, v);
        };
        f.get = [member](const ExperimentConfig& c) { return fmt_double(c.*member); };
    } else if constexpr (std::is_same_v<T, bool>) {
        f.set = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*member = to_bool(k, v);
        };
        f.get = [member](const ExperimentConfig& c) { return fmt_bool(c.*member); };
    } else if constexpr (std::is_same_v<T, std::string>) {
        f.set = [member](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.*member = v;
        };
        f.get = [member](const ExperimentConfig& c) { return c.*member; };
    } else {
        f.set = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            const std::uint64_t x = to_u64(k, v);
            if (x > std::numeric_limits<T>::max()) bad_value(k, v, "an in-range integer");
            c.*member = static_cast<T>(x);
        };
        f.get = [member](const ExperimentConfig& c) { return fmt::format("{}", c.*member); };
    }
    return f;
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        using C = ExperimentConfig;
        std::map<std::string, Field> t;
        t["mode"] = number_field(&C::mode);
        t["alpha"] = number_field(&C::alpha);
        t["rho"] = number_field(&C::rho);
        t["sigma"] = number_field(&C::sigma);
        t["drift"] = number_field(&C::drift);
        t["transform"] = number_field(&C::transform);
        t["l_max"] = number_field(&C::l_max);
        t["structural_eps"] = number_field(&C::structural_eps);
        t["init"] = number_field(&C::init);
        t["forcing"] = number_field(&C::forcing);
        t["dt"] = number_field(&C::dt);
        t["t_final"] = number_field(&C::t_final);
        t["dx"] = number_field(&C::dx);
        t["upper"] = number_field(&C::upper);
        t["fp_eps"] = number_field(&C::fp_eps);
        t["fp_max_iter"] = number_field(&C::fp_max_iter);
        t["jump_threshold"] = number_field(&C::jump_threshold);
        t["image_kernel"] = number_field(&C::image_kernel);
        t["kernel_width"] = number_field(&C::kernel_width);
        t["confirm_blowups"] = number_field(&C::confirm_blowups);
        t["confirm_window"] = number_field(&C::confirm_window);
        t["confirm_ratio"] = number_field(&C::confirm_ratio);
        t["snapshot_every"] = number_field(&C::snapshot_every);
        t["n_particles"] = number_field(&C::n_particles);
        t["common_seed"] = number_field(&C::common_seed);
        t["idio_seed"] = number_field(&C::idio_seed);
        t["paths"] = number_field(&C::paths);
        t["base_seed"] = number_field(&C::base_seed);
        t["n_seeds"] = number_field(&C::n_seeds);
        t["threads"] = number_field(&C::threads);
        t["out_loss"] = number_field(&C::out_loss);
        t["out_snapshots"] = number_field(&C::out_snapshots);
        t["out_density"] = number_field(&C::out_density);
        t["out_events"] = number_field(&C::out_events);
        t["out_diagnostics"] = number_field(&C::out_diagnostics);
        t["out_noise"] = number_field(&C::out_noise);
        t["out_report"] = number_field(&C::out_report);
        t["common_noise"] = number_field(&C::common_noise);
        t["heatmap"] = number_field(&C::heatmap);
        Field n_list;
        n_list.set = [](C& c, const std::string& k, const std::string& v) {
            c.n_list = to_size_list(k, v);
        };
        n_list.get = [](const C& c) { return fmt::format("{}", fmt::join(c.n_list, ",")); };
        t["n_list"] = n_list;
        return t;
    }();
    return table;
}

void set_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ValidationError(fmt::format("unknown key '{}'", key));
    it->second.set(config, key, value);
}

// Rethrows parse failures of sub-specifications with the key prepended.
template <class Fn>
auto with_key(const char* key, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(fmt::format("{}: {}", key, e.what()));
    }
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, f] : fields()) keys.push_back(k);
    return keys;
}

ExperimentConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
    ExperimentConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(fmt::format("line {}: expected key = value", line_no));
        }
        set_key(config, trim(std::string_view(body).substr(0, eq)),
                trim(std::string_view(body).substr(eq + 1)));
    }
    for (const auto& [key, value] : overrides) set_key(config, key, trim(value));
    validate_config(config);
    return config;
}

std::string dump_config(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [key, field] : fields()) {
        out += fmt::format("{} = {}\n", key, field.get(config));
    }
    return out;
}

void validate_config(const ExperimentConfig& c) {
    static const char* const kModes[] = {"particles", "density", "coupled", "blowup-prob",
                                         "verdict"};
    if (std::find(std::begin(kModes), std::end(kModes), c.mode) == std::end(kModes)) {
        throw ValidationError(fmt::format("mode: unknown mode '{}'", c.mode));
    }
    if (c.n_particles == 0) throw ValidationError("n_particles: must be at least 1");
    if (c.paths == 0) throw ValidationError("paths: must be at least 1");
    if (c.n_seeds == 0) throw ValidationError("n_seeds: must be at least 1");
    if (c.n_list.empty()) throw ValidationError("n_list: must list at least one N");
    for (std::size_t n : c.n_list) {
        if (n == 0) throw ValidationError("n_list: every N must be at least 1");
    }
    const TimeGrid time = build_time_grid(c);
    build_space_grid(c);
    build_params(c).validate(time, c.structural_eps);
    build_init(c);
    build_solver_config(c).validate();
    if (c.forcing != "brownian" && c.forcing != "zero" && c.forcing.rfind("ramp:", 0) != 0) {
        throw ValidationError(fmt::format("forcing: unknown forcing '{}'", c.forcing));
    }
    if (c.forcing.rfind("ramp:", 0) == 0) build_forcing(c);
}

TimeGrid build_time_grid(const ExperimentConfig& c) {
    if (!(c.dt > 0.0)) throw ValidationError("dt: must be positive");
    if (!(c.t_final > 0.0)) throw ValidationError("t_final: must be positive");
    return with_key("t_final", [&] { return TimeGrid::from_horizon(c.dt, c.t_final); });
}

SpaceGrid build_space_grid(const ExperimentConfig& c) {
    if (!(c.dx > 0.0)) throw ValidationError("dx: must be positive");
    if (!(c.upper > c.dx)) throw ValidationError("upper: must exceed dx");
    return with_key("upper", [&] { return SpaceGrid(c.dx, c.upper); });
}

ModelParams build_params(const ExperimentConfig& c) {
    ModelParams p;
    p.alpha = c.alpha;
    p.rho = c.rho;
    p.sigma = c.sigma;
    p.drift = with_key("drift", [&] { return Drift::parse(c.drift); });
    p.transform = with_key("transform", [&] { return LossTransform::parse(c.transform, c.l_max); });
    return p;
}

InitialCondition build_init(const ExperimentConfig& c) {
    return with_key("init", [&] { return InitialCondition::parse(c.init); });
}

SolverConfig build_solver_config(const ExperimentConfig& c) {
    SolverConfig s(build_time_grid(c), build_space_grid(c));
    s.fp_eps = c.fp_eps;
    s.fp_max_iter = c.fp_max_iter;
    s.jump_threshold = c.jump_threshold;
    s.image_kernel = c.image_kernel;
    s.kernel_width = c.kernel_width;
    s.snapshot_every = c.snapshot_every;
    s.confirm_blowups = c.confirm_blowups;
    s.confirm_window = c.confirm_window;
    s.confirm_ratio = c.confirm_ratio;
    s.structural_eps = c.structural_eps;
    return s;
}

Forcing build_forcing(const ExperimentConfig& c, std::uint64_t seed_offset) {
    const TimeGrid grid = build_time_grid(c);
    if (c.forcing == "zero") return Forcing::none(grid);
    if (c.forcing.rfind("ramp:", 0) == 0) {
        const std::string rest = c.forcing.substr(5);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) bad_value("forcing", c.forcing, "ramp:<start>:<slope>");
        const double start = to_double("forcing", rest.substr(0, colon));
        const double slope = to_double("forcing", rest.substr(colon + 1));
        return Forcing::deterministic(grid, [=](double t) { return start + slope * t; });
    }
    if (!c.common_noise.empty()) {
        std::ifstream in(c.common_noise);
        if (!in) throw ValidationError(fmt::format("common_noise: cannot open '{}'", c.common_noise));
        return with_key("common_noise", [&] { return Forcing::brownian(read_noise_csv(in, grid)); });
    }
    return Forcing::brownian(generate_noise(c.common_seed + seed_offset, grid));
}

}  // namespace mfsim
