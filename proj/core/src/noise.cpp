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

#include "mfsim/noise.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "mfsim/error.hpp"
#include "mfsim/philox.hpp"

namespace mfsim {

NoisePath::NoisePath(TimeGrid grid, std::uint64_t seed, std::uint32_t stream,
                     std::vector<double> increments, unsigned refinement_level)
    : grid_(grid), seed_(seed), stream_(stream), increments_(std::move(increments)),
      level_(refinement_level) {
    if (increments_.size() != grid_.n_steps()) {
        throw ValidationError(fmt::format("noise path: {} increments for {} steps",
                                          increments_.size(), grid_.n_steps()));
    }
}

NoisePath NoisePath::refined() const {
    const double half_sd = std::sqrt(grid_.dt()) / 2.0;
    const auto purpose = static_cast<std::uint32_t>(rng::Purpose::BridgeRefinement) + level_;
    std::vector<double> fine;
    fine.reserve(2 * increments_.size());
    for (std::size_t k = 0; k < increments_.size(); ++k) {
        const double z = rng::standard_normal({seed_, stream_, k, purpose});
        const double first = 0.5 * increments_[k] + half_sd * z;
        fine.push_back(first);
        fine.push_back(increments_[k] - first);
    }
    return NoisePath(grid_.refined(), seed_, stream_, std::move(fine), level_ + 1);
}

double brownian_increment(std::uint64_t seed, std::uint32_t stream, std::size_t k, double dt) {
    return std::sqrt(dt) *
           rng::standard_normal({seed, stream, k, static_cast<std::uint32_t>(rng::Purpose::Increment)});
}

NoisePath generate_noise(std::uint64_t seed, const TimeGrid& grid, std::uint32_t stream) {
    std::vector<double> increments(grid.n_steps());
    for (std::size_t k = 0; k < increments.size(); ++k) {
        increments[k] = brownian_increment(seed, stream, k, grid.dt());
    }
    return NoisePath(grid, seed, stream, std::move(increments));
}

void write_noise_csv(std::ostream& out, const NoisePath& path) {
    out << "k,increment\n";
    for (std::size_t k = 0; k < path.increments().size(); ++k) {
        out << fmt::format("{},{:.17g}\n", k, path.increment(k));
    }
}

NoisePath read_noise_csv(std::istream& in, const TimeGrid& grid) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("k,increment", 0) != 0) {
        throw ValidationError("noise csv: expected header 'k,increment'");
    }
    std::vector<double> increments;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("noise csv: malformed row '" + line + "'");
        try {
            const auto k = std::stoull(line.substr(0, comma));
            if (k != increments.size()) throw ValidationError("noise csv: rows out of order");
            increments.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw ValidationError("noise csv: malformed row '" + line + "'");
        }
    }
    return NoisePath(grid, 0, kCommonStream, std::move(increments));
}

Forcing Forcing::brownian(NoisePath noise) { return Forcing(BrownianScaled{std::move(noise)}); }

Forcing Forcing::deterministic(TimeGrid grid, std::vector<double> path) {
    if (path.size() != grid.n_steps() + 1) {
        throw ValidationError(fmt::format("forcing: deterministic path needs {} values, got {}",
                                          grid.n_steps() + 1, path.size()));
    }
    for (double v : path) {
        if (!std::isfinite(v)) throw ValidationError("forcing: deterministic path must be finite");
    }
    return Forcing(Deterministic{grid, std::move(path)});
}

Forcing Forcing::deterministic(const TimeGrid& grid, const std::function<double(double)>& fn) {
    std::vector<double> path(grid.n_steps() + 1);
    for (std::size_t k = 0; k < path.size(); ++k) path[k] = fn(grid.time(k));
    return deterministic(grid, std::move(path));
}

Forcing Forcing::none(const TimeGrid& grid) {
    return deterministic(grid, std::vector<double>(grid.n_steps() + 1, 0.0));
}

const TimeGrid& Forcing::grid() const {
    if (const auto* b = std::get_if<BrownianScaled>(&variant_)) return b->noise.grid();
    return std::get<Deterministic>(variant_).grid;
}

double Forcing::initial_offset() const {
    if (const auto* d = std::get_if<Deterministic>(&variant_)) return d->path.front();
    return 0.0;
}

Forcing Forcing::refined() const {
    if (const auto* b = std::get_if<BrownianScaled>(&variant_)) return brownian(b->noise.refined());
    const auto& d = std::get<Deterministic>(variant_);
    std::vector<double> fine(2 * d.path.size() - 1);
    for (std::size_t k = 0; k < d.path.size(); ++k) {
        fine[2 * k] = d.path[k];
        if (k + 1 < d.path.size()) fine[2 * k + 1] = 0.5 * (d.path[k] + d.path[k + 1]);
    }
    return deterministic(d.grid.refined(), std::move(fine));
}

double forcing_value(const Forcing& forcing, const ModelParams& params, std::size_t k) {
    if (k >= forcing.grid().n_steps()) {
        throw std::out_of_range(fmt::format("forcing: step {} out of range [0, {})", k,
                                            forcing.grid().n_steps()));
    }
    if (const auto* b = std::get_if<Forcing::BrownianScaled>(&forcing.variant())) {
        const double t = b->noise.grid().time(k);
        return params.sigma(t) * params.rho(t) * b->noise.increment(k);
    }
    const auto& d = std::get<Forcing::Deterministic>(forcing.variant());
    return d.path[k + 1] - d.path[k];
}

}  // namespace mfsim
