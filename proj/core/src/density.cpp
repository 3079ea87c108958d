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

#include "mfsim/density.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "mfsim/error.hpp"

namespace mfsim {

Density::Density(SpaceGrid grid, double leaked_mass)
    : grid_(grid), values_(grid.n_points(), 0.0), leaked_mass_(leaked_mass) {}

Density::Density(SpaceGrid grid, std::vector<double> values, double leaked_mass)
    : grid_(grid), values_(std::move(values)), leaked_mass_(leaked_mass) {
    if (values_.size() != grid_.n_points()) {
        throw ValidationError(fmt::format("density: {} values for a grid of {} nodes",
                                          values_.size(), grid_.n_points()));
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!(values_[j] >= 0.0) || !std::isfinite(values_[j])) {
            throw ValidationError(
                fmt::format("density: value at node {} is {}, must be finite and >= 0", j,
                            values_[j]));
        }
    }
    if (!(leaked_mass_ >= 0.0)) {
        throw ValidationError("density: leaked mass must be >= 0");
    }
}

double Density::at(double x) const {
    if (x < 0.0) return 0.0;
    const double p = x / grid_.dx();
    const auto n = values_.size();
    if (p > static_cast<double>(n - 1)) return 0.0;
    const auto i = std::min(static_cast<std::size_t>(p), n - 2);
    const double frac = p - static_cast<double>(i);
    return values_[i] + (values_[i + 1] - values_[i]) * frac;
}

Density Density::with_leaked_mass(double leaked) const {
    Density copy = *this;
    copy.leaked_mass_ = leaked;
    return copy;
}

double total_mass(const Density& density) {
    const auto v = density.values();
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) sum += v[j] + v[j + 1];
    return 0.5 * density.grid().dx() * sum;
}

double cdf(const Density& density, double x) {
    if (!(x > 0.0)) return 0.0;
    const auto v = density.values();
    const double dx = density.grid().dx();
    const auto n = v.size();
    const double p = x / dx;
    if (p >= static_cast<double>(n - 1)) return total_mass(density);

    const auto cell = static_cast<std::size_t>(p);
    double sum = 0.0;
    for (std::size_t j = 0; j < cell; ++j) sum += v[j] + v[j + 1];
    sum *= 0.5 * dx;
    const double r = (p - static_cast<double>(cell)) * dx;
    const double vx = v[cell] + (v[cell + 1] - v[cell]) * (r / dx);
    return sum + 0.5 * r * (v[cell] + vx);
}

double sup_norm(const Density& density) {
    const auto v = density.values();
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

Density shift_density(const Density& density, double delta) {
    if (!(delta >= 0.0)) {
        throw ValidationError(fmt::format("shift_density: delta must be >= 0, got {}", delta));
    }
    if (delta == 0.0) return density;

    const auto v = density.values();
    const auto n = v.size();
    const double offset = delta / density.grid().dx();
    std::vector<double> shifted(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = static_cast<double>(j) + offset;
        if (p > static_cast<double>(n - 1)) break;
        const auto i = std::min(static_cast<std::size_t>(p), n - 2);
        const double frac = p - static_cast<double>(i);
        shifted[j] = v[i] + (v[i + 1] - v[i]) * frac;
    }
    return Density(density.grid(), std::move(shifted), density.leaked_mass());
}

CdfTable::CdfTable(const Density& density)
    : dx_(density.grid().dx()),
      values_(density.values().begin(), density.values().end()),
      cumulative_(values_.size(), 0.0) {
    for (std::size_t j = 1; j < values_.size(); ++j) {
        cumulative_[j] = cumulative_[j - 1] + 0.5 * dx_ * (values_[j - 1] + values_[j]);
    }
}

double CdfTable::operator()(double x) const {
    if (!(x > 0.0)) return 0.0;
    const auto n = values_.size();
    const double p = x / dx_;
    if (p >= static_cast<double>(n - 1)) return cumulative_.back();
    const auto cell = static_cast<std::size_t>(p);
    const double r = (p - static_cast<double>(cell)) * dx_;
    const double vx = values_[cell] + (values_[cell + 1] - values_[cell]) * (r / dx_);
    return cumulative_[cell] + 0.5 * r * (values_[cell] + vx);
}

void write_density_csv(std::ostream& out, const Density& density) {
    out << "x,value\n";
    const auto& grid = density.grid();
    for (std::size_t j = 0; j < density.size(); ++j) {
        out << fmt::format("{:.17g},{:.17g}\n", grid.x(j), density.value(j));
    }
}

Density read_density_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("density csv: empty input");
    if (line.rfind("x,value", 0) != 0) {
        throw ValidationError("density csv: expected header 'x,value', got '" + line + "'");
    }
    std::vector<double> xs;
    std::vector<double> vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string xs_field;
        std::string vs_field;
        if (!std::getline(row, xs_field, ',') || !std::getline(row, vs_field)) {
            throw ValidationError("density csv: malformed row '" + line + "'");
        }
        try {
            xs.push_back(std::stod(xs_field));
            vs.push_back(std::stod(vs_field));
        } catch (const std::exception&) {
            throw ValidationError("density csv: non-numeric row '" + line + "'");
        }
    }
    if (xs.size() < 2) throw ValidationError("density csv: need at least two nodes");
    if (xs.front() != 0.0) throw ValidationError("density csv: first node must be x=0");
    const double dx = xs[1] - xs[0];
    for (std::size_t j = 1; j < xs.size(); ++j) {
        if (std::abs(xs[j] - static_cast<double>(j) * dx) > 1e-9 * std::max(1.0, xs[j])) {
            throw ValidationError("density csv: nodes are not uniformly spaced");
        }
    }
    SpaceGrid grid(dx, xs.back());
    if (grid.n_points() != vs.size()) {
        throw ValidationError("density csv: node count does not match spacing");
    }
    return Density(grid, std::move(vs));
}

}  // namespace mfsim
