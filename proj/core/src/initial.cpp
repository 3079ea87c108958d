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

#include "mfsim/initial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "mfsim/error.hpp"
#include "mfsim/numeric.hpp"

namespace mfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_field(const std::string& field) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (field.empty() || used != field.size() || !std::isfinite(value)) {
        throw ValidationError(fmt::format("init: '{}' is not a finite number", field));
    }
    return value;
}

// Mass of the truncated normal law above 0, i.e. P(N(mean, sd^2) > 0).
double positive_mass(double mean, double sd) { return numeric::normal_sf(-mean / sd); }

}  // namespace

InitialCondition InitialCondition::dirac(double x0) {
    if (!(x0 > 0.0) || !std::isfinite(x0)) {
        throw ValidationError(fmt::format("init: Dirac location must be > 0, got {}", x0));
    }
    return InitialCondition(Dirac{x0});
}

InitialCondition InitialCondition::uniform(double a, double b) {
    if (!(a > 0.0 && b > a) || !std::isfinite(b)) {
        throw ValidationError(fmt::format("init: uniform law needs 0 < a < b, got a={}, b={}", a, b));
    }
    return InitialCondition(Uniform{a, b});
}

InitialCondition InitialCondition::truncated_gaussian(double mean, double sd) {
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
        throw ValidationError(fmt::format("init: gaussian needs finite mean and sd > 0, got {}, {}",
                                          mean, sd));
    }
    if (positive_mass(mean, sd) < 1e-12) {
        throw ValidationError("init: gaussian has no appreciable mass on (0, infinity)");
    }
    return InitialCondition(TruncatedGaussian{mean, sd});
}

InitialCondition InitialCondition::tabulated(const Density& density) {
    const double mass = total_mass(density);
    if (!(mass > 0.0)) throw ValidationError("init: tabulated density has zero mass");
    if (density.value(0) != 0.0) {
        throw ValidationError("init: tabulated density must vanish at x=0 (support in (0, inf))");
    }
    std::vector<double> values(density.values().begin(), density.values().end());
    for (double& v : values) v /= mass;
    auto normalised = std::make_shared<const Density>(density.grid(), std::move(values));
    auto table = std::make_shared<const CdfTable>(*normalised);
    return InitialCondition(Tabulated{std::move(normalised), std::move(table)});
}

InitialCondition InitialCondition::parse(std::string_view desc) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    const std::string text(desc);
    const auto head_end = text.find(':');
    const std::string head = text.substr(0, head_end);
    if (head == "table") {
        if (head_end == std::string::npos) throw ValidationError("init: table:<path> needs a path");
        const std::string path = text.substr(head_end + 1);
        std::ifstream in(path);
        if (!in) throw ValidationError("init: cannot open density table '" + path + "'");
        auto init = tabulated(read_density_csv(in));
        init.source_ = path;
        return init;
    }
    while (true) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (parts[0] == "dirac" && parts.size() == 2) return dirac(parse_field(parts[1]));
    if (parts[0] == "uniform" && parts.size() == 3) {
        return uniform(parse_field(parts[1]), parse_field(parts[2]));
    }
    if (parts[0] == "gauss" && parts.size() == 3) {
        return truncated_gaussian(parse_field(parts[1]), parse_field(parts[2]));
    }
    throw ValidationError(fmt::format(
        "init: cannot parse '{}' (expected dirac:<x0>, uniform:<a>:<b>, gauss:<mean>:<sd> or "
        "table:<path>)",
        desc));
}

std::string InitialCondition::to_string() const {
    return std::visit(
        Overloaded{
            [](const Dirac& d) { return fmt::format("dirac:{:.17g}", d.x0); },
            [](const Uniform& u) { return fmt::format("uniform:{:.17g}:{:.17g}", u.a, u.b); },
            [](const TruncatedGaussian& g) {
                return fmt::format("gauss:{:.17g}:{:.17g}", g.mean, g.sd);
            },
            [this](const Tabulated&) { return "table:" + source_; },
        },
        variant_);
}

double InitialCondition::mean() const {
    return std::visit(
        Overloaded{
            [](const Dirac& d) { return d.x0; },
            [](const Uniform& u) { return 0.5 * (u.a + u.b); },
            [](const TruncatedGaussian& g) {
                const double z = -g.mean / g.sd;
                return g.mean + g.sd * numeric::normal_pdf(z) / numeric::normal_sf(z);
            },
            [](const Tabulated& t) {
                const auto& d = *t.density;
                double first = 0.0;
                for (std::size_t j = 0; j < d.size(); ++j) {
                    first += d.grid().weight(j) * d.grid().x(j) * d.value(j);
                }
                return first / total_mass(d);
            },
        },
        variant_);
}

double InitialCondition::support_lower() const {
    return std::visit(Overloaded{
                          [](const Dirac& d) { return d.x0; },
                          [](const Uniform& u) { return u.a; },
                          [](const TruncatedGaussian&) { return 0.0; },
                          [](const Tabulated& t) {
                              const auto& d = *t.density;
                              for (std::size_t j = 0; j < d.size(); ++j) {
                                  if (d.value(j) > 0.0) return d.grid().x(j == 0 ? 0 : j - 1);
                              }
                              return 0.0;
                          },
                      },
                      variant_);
}

double InitialCondition::support_upper() const {
    return std::visit(Overloaded{
                          [](const Dirac& d) { return d.x0; },
                          [](const Uniform& u) { return u.b; },
                          [](const TruncatedGaussian&) { return kInf; },
                          [](const Tabulated& t) {
                              const auto& d = *t.density;
                              for (std::size_t j = d.size(); j-- > 0;) {
                                  if (d.value(j) > 0.0) {
                                      return d.grid().x(std::min(j + 1, d.size() - 1));
                                  }
                              }
                              return 0.0;
                          },
                      },
                      variant_);
}

double InitialCondition::sup_density() const {
    return std::visit(Overloaded{
                          [](const Dirac&) { return kInf; },
                          [](const Uniform& u) { return 1.0 / (u.b - u.a); },
                          [](const TruncatedGaussian& g) {
                              const double peak = std::max(g.mean, 0.0);
                              return numeric::normal_pdf((peak - g.mean) / g.sd) /
                                     (g.sd * positive_mass(g.mean, g.sd));
                          },
                          [](const Tabulated& t) { return sup_norm(*t.density); },
                      },
                      variant_);
}

double InitialCondition::quantile(double u) const {
    return std::visit(
        Overloaded{
            [](const Dirac& d) { return d.x0; },
            [u](const Uniform& un) { return un.a + (un.b - un.a) * u; },
            [u](const TruncatedGaussian& g) {
                // Sample the upper tail in survival form to stay accurate when
                // the truncation point sits far in the left tail.
                const double z0 = -g.mean / g.sd;
                const double tail = numeric::normal_sf(z0) * (1.0 - u);
                const double z = -numeric::normal_quantile(tail);
                return std::max(g.mean + g.sd * z, std::numeric_limits<double>::min());
            },
            [u](const Tabulated& t) {
                const auto& d = *t.density;
                const CdfTable& table = *t.cdf;
                const double target = u * table.total();
                const double dx = d.grid().dx();
                std::size_t lo = 0;
                std::size_t hi = d.size() - 1;
                while (hi - lo > 1) {
                    const std::size_t mid = (lo + hi) / 2;
                    if (table(d.grid().x(mid)) < target) lo = mid; else hi = mid;
                }
                // Invert the trapezoid CDF inside [x_lo, x_lo + dx].
                const double base = table(d.grid().x(lo));
                const double v0 = d.value(lo);
                const double slope = (d.value(lo + 1) - v0) / dx;
                const double need = target - base;
                double r;
                if (std::abs(slope) < 1e-14 * std::max(1.0, v0)) {
                    r = v0 > 0.0 ? need / v0 : 0.5 * dx;
                } else {
                    r = (-v0 + std::sqrt(std::max(0.0, v0 * v0 + 2.0 * slope * need))) / slope;
                }
                r = std::clamp(r, 0.0, dx);
                return std::max(d.grid().x(lo) + r, std::numeric_limits<double>::min());
            },
        },
        variant_);
}

Density InitialCondition::tabulate(const SpaceGrid& grid) const {
    const auto n = grid.n_points();
    std::vector<double> values(n, 0.0);
    double mass_on_grid = 1.0;
    std::visit(Overloaded{
                   [](const Dirac&) {
                       throw ValidationError("init: a Dirac initial law is kept symbolic and cannot "
                                             "be tabulated");
                   },
                   [&](const Uniform& u) {
                       const double h = 1.0 / (u.b - u.a);
                       for (std::size_t j = 0; j < n; ++j) {
                           const double x = grid.x(j);
                           if (x > u.a && x < u.b) values[j] = h;
                           else if (x == u.a || x == u.b) values[j] = 0.5 * h;
                       }
                       mass_on_grid = std::clamp((std::min(u.b, grid.last()) - u.a) * h, 0.0, 1.0);
                   },
                   [&](const TruncatedGaussian& g) {
                       const double norm = g.sd * positive_mass(g.mean, g.sd);
                       for (std::size_t j = 1; j < n; ++j) {
                           values[j] = numeric::normal_pdf((grid.x(j) - g.mean) / g.sd) / norm;
                       }
                       // The truncated law has a jump at 0+; node 0 carries its right limit.
                       values[0] = numeric::normal_pdf(-g.mean / g.sd) / norm;
                       mass_on_grid = 1.0 - numeric::normal_sf((grid.last() - g.mean) / g.sd) /
                                                positive_mass(g.mean, g.sd);
                   },
                   [&](const Tabulated& t) {
                       const auto& d = *t.density;
                       for (std::size_t j = 0; j < n; ++j) values[j] = d.at(grid.x(j));
                       mass_on_grid = std::min(1.0, cdf(d, grid.last()) / total_mass(d));
                   },
               },
               variant_);
    Density tab(grid, values);
    const double raw = total_mass(tab);
    if (raw > 0.0) {
        for (double& v : values) v *= mass_on_grid / raw;
    }
    return Density(grid, std::move(values), std::max(0.0, 1.0 - mass_on_grid));
}

InitialCondition InitialCondition::shifted(double offset) const {
    if (offset == 0.0) return *this;
    return std::visit(
        Overloaded{
            [&](const Dirac& d) { return dirac(d.x0 + offset); },
            [&](const Uniform& u) { return uniform(u.a + offset, u.b + offset); },
            [&](const TruncatedGaussian&) -> InitialCondition {
                throw ValidationError(
                    "init: a truncated gaussian touches the origin and cannot be displaced");
            },
            [&](const Tabulated& t) -> InitialCondition {
                const auto& d = *t.density;
                if (support_lower() + offset <= 0.0) {
                    throw ValidationError("init: displacement pushes the tabulated law to the origin");
                }
                const double dx = d.grid().dx();
                const SpaceGrid grid(dx, d.grid().last() + std::max(offset, 0.0));
                std::vector<double> values(grid.n_points());
                for (std::size_t j = 0; j < values.size(); ++j) values[j] = d.at(grid.x(j) - offset);
                auto init = tabulated(Density(grid, std::move(values)));
                init.source_ = fmt::format("{}@{:+.17g}", source_, offset);
                return init;
            },
        },
        variant_);
}

}  // namespace mfsim
