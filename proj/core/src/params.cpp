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

#include "mfsim/params.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mfsim/error.hpp"

namespace mfsim {

TimeFunction::TimeFunction(double constant)
    : constant_(constant), description_(fmt::format("{:.17g}", constant)) {}

TimeFunction::TimeFunction(std::function<double(double)> fn, std::string description)
    : fn_(std::move(fn)), description_(std::move(description)) {}

Drift Drift::zero() { return Drift{}; }

Drift Drift::constant(double c) {
    Drift d;
    d.kind_ = c == 0.0 ? Kind::Zero : Kind::Constant;
    d.a_ = c;
    return d;
}

Drift Drift::ornstein_uhlenbeck(double kappa, double theta) {
    Drift d;
    d.kind_ = Kind::OrnsteinUhlenbeck;
    d.a_ = kappa;
    d.b_ = theta;
    return d;
}

Drift Drift::custom(std::function<double(double, double)> fn, double growth_constant,
                    std::string description) {
    if (!(growth_constant >= 0.0) || !std::isfinite(growth_constant)) {
        throw ValidationError("drift: custom drift needs a finite growth constant");
    }
    Drift d;
    d.kind_ = Kind::Custom;
    d.a_ = growth_constant;
    d.fn_ = std::move(fn);
    d.description_ = std::move(description);
    return d;
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_number(const std::string& field, std::string_view context) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != field.size() || field.empty() || !std::isfinite(value)) {
        throw ValidationError(fmt::format("{}: '{}' is not a finite number", context, field));
    }
    return value;
}

}  // namespace

Drift Drift::parse(std::string_view desc) {
    const auto parts = split(desc, ':');
    if (parts[0] == "zero" && parts.size() == 1) return zero();
    if (parts[0] == "const" && parts.size() == 2) return constant(parse_number(parts[1], "drift"));
    if (parts[0] == "ou" && parts.size() == 3) {
        return ornstein_uhlenbeck(parse_number(parts[1], "drift"), parse_number(parts[2], "drift"));
    }
    throw ValidationError(fmt::format(
        "drift: cannot parse '{}' (expected zero, const:<c> or ou:<kappa>:<theta>)", desc));
}

double Drift::operator()(double t, double x) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return a_;
        case Kind::OrnsteinUhlenbeck: return a_ * (b_ - x);
        case Kind::Custom: return fn_(t, x);
    }
    return 0.0;
}

double Drift::growth_constant() const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return std::abs(a_);
        case Kind::OrnsteinUhlenbeck: return std::max(std::abs(a_), std::abs(a_ * b_));
        case Kind::Custom: return a_;
    }
    return 0.0;
}

std::string Drift::to_string() const {
    switch (kind_) {
        case Kind::Zero: return "zero";
        case Kind::Constant: return fmt::format("const:{:.17g}", a_);
        case Kind::OrnsteinUhlenbeck: return fmt::format("ou:{:.17g}:{:.17g}", a_, b_);
        case Kind::Custom: return description_;
    }
    return "zero";
}

void ModelParams::validate(const TimeGrid& grid, double eps) const {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw ValidationError(fmt::format("structural_eps: must lie in (0, 0.5), got {}", eps));
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ValidationError(fmt::format("alpha: feedback strength must be >= 0, got {}", alpha));
    }
    for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
        const double t = grid.time(k);
        const double r = rho(t);
        if (!(r >= 0.0 && r <= 1.0 - eps)) {
            throw ValidationError(fmt::format(
                "rho: value {} at t={} violates the non-degeneracy bound 0 <= rho <= 1 - eps "
                "(eps = {})",
                r, t, eps));
        }
        const double s = sigma(t);
        if (!(s >= eps && s <= 1.0 / eps)) {
            throw ValidationError(fmt::format(
                "sigma: value {} at t={} violates the bound eps <= sigma <= 1/eps (eps = {})", s,
                t, eps));
        }
    }
    const double c = drift.growth_constant();
    for (std::size_t k = 0; k <= grid.n_steps(); k += std::max<std::size_t>(1, grid.n_steps() / 16)) {
        const double t = grid.time(k);
        for (double x : {0.0, 0.5, 1.0, 10.0, 100.0, -1.0, -10.0}) {
            const double b = drift(t, x);
            if (!std::isfinite(b) || std::abs(b) > c * (1.0 + std::abs(x)) * (1.0 + 1e-12) + 1e-300) {
                throw ValidationError(fmt::format(
                    "drift: |b(t,x)| <= C (1 + |x|) fails at t={}, x={} (b={}, C={})", t, x, b, c));
            }
        }
    }
}

bool ModelParams::idiosyncratic_only(const TimeGrid& grid) const {
    if (auto c = rho.constant()) return *c == 0.0;
    for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
        if (rho(grid.time(k)) != 0.0) return false;
    }
    return true;
}

}  // namespace mfsim
