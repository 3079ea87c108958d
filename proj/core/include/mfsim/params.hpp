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

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "mfsim/grid.hpp"
#include "mfsim/transform.hpp"

namespace mfsim {

/// A coefficient of time: either a constant or an arbitrary callable.
class TimeFunction {
public:
    TimeFunction(double constant);  // NOLINT: implicit on purpose, rho = 0.5 reads naturally
    TimeFunction(std::function<double(double)> fn, std::string description);

    double operator()(double t) const { return constant_ ? *constant_ : fn_(t); }
    std::optional<double> constant() const { return constant_; }
    const std::string& description() const { return description_; }

private:
    std::optional<double> constant_;
    std::function<double(double)> fn_;
    std::string description_;
};

/// Spatial drift b(t, x).
///
/// Parsed forms: `zero`, `const:<c>`, `ou:<kappa>:<theta>` for
/// b = kappa (theta - x). Custom callables must declare a linear growth
/// constant C with |b(t,x)| <= C (1 + |x|).
class Drift {
public:
    enum class Kind { Zero, Constant, OrnsteinUhlenbeck, Custom };

    static Drift zero();
    static Drift constant(double c);
    static Drift ornstein_uhlenbeck(double kappa, double theta);
    static Drift custom(std::function<double(double, double)> fn, double growth_constant,
                        std::string description);
    static Drift parse(std::string_view desc);

    double operator()(double t, double x) const;
    Kind kind() const { return kind_; }
    /// True when b does not depend on x (so one-step transport is a pure shift).
    bool space_independent() const { return kind_ == Kind::Zero || kind_ == Kind::Constant; }
    double growth_constant() const;
    std::string to_string() const;

private:
    Kind kind_ = Kind::Zero;
    double a_ = 0.0;
    double b_ = 0.0;
    std::function<double(double, double)> fn_;
    std::string description_;
};

/// Full coefficient set: alpha, rho(t), sigma(t), b(t,x) and the loss transform.
struct ModelParams {
    double alpha = 1.0;
    TimeFunction rho = 0.0;
    TimeFunction sigma = 1.0;
    Drift drift = Drift::zero();
    LossTransform transform = LossTransform::linear();

    /// Checks alpha >= 0 and the structural bounds 0 <= rho <= 1 - eps,
    /// eps <= sigma <= 1/eps at every grid time, plus the drift growth bound.
    /// Throws ValidationError naming the offending key.
    void validate(const TimeGrid& grid, double eps = kDefaultStructuralEps) const;

    /// One-step idiosyncratic variance sigma(t)^2 (1 - rho(t)^2) dt.
    double idiosyncratic_variance(double t, double dt) const {
        const double s = sigma(t);
        const double r = rho(t);
        return s * s * (1.0 - r * r) * dt;
    }

    /// True when rho(t_k) == 0 at every grid time.
    bool idiosyncratic_only(const TimeGrid& grid) const;

    static constexpr double kDefaultStructuralEps = 1e-3;
};

}  // namespace mfsim
