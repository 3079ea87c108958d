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

#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "mfsim/density.hpp"
#include "mfsim/grid.hpp"

namespace mfsim {

/// Law of X_0, supported in (0, infinity).
class InitialCondition {
public:
    struct Dirac {
        double x0;
    };
    struct Uniform {
        double a;
        double b;
    };
    /// Normal(mean, sd) conditioned on (0, infinity).
    struct TruncatedGaussian {
        double mean;
        double sd;
    };
    /// Probability density given on a grid (normalised to unit mass on construction).
    struct Tabulated {
        std::shared_ptr<const Density> density;
        std::shared_ptr<const CdfTable> cdf;
    };

    using Variant = std::variant<Dirac, Uniform, TruncatedGaussian, Tabulated>;

    static InitialCondition dirac(double x0);
    static InitialCondition uniform(double a, double b);
    static InitialCondition truncated_gaussian(double mean, double sd);
    static InitialCondition tabulated(const Density& density);

    /// `dirac:<x0>`, `uniform:<a>:<b>`, `gauss:<mean>:<sd>`, `table:<csv path>`.
    static InitialCondition parse(std::string_view desc);

    const Variant& variant() const { return variant_; }
    bool is_dirac() const { return std::holds_alternative<Dirac>(variant_); }
    std::string to_string() const;

    /// E[X_0].
    double mean() const;
    /// Infimum / supremum of the support (supremum may be +infinity).
    double support_lower() const;
    double support_upper() const;
    /// Sup-norm of the density; +infinity for a Dirac mass.
    double sup_density() const;
    /// Inverse CDF, u in (0, 1).
    double quantile(double u) const;

    /// Tabulates the density on `grid`: node samples rescaled so that the
    /// trapezoid mass equals the law's mass on [0, upper]; the remainder is
    /// reported as leaked mass. Throws for a Dirac mass (kept symbolic).
    Density tabulate(const SpaceGrid& grid) const;

    /// Same law translated by `offset` (must keep the support in (0, inf)).
    InitialCondition shifted(double offset) const;

private:
    explicit InitialCondition(Variant v, std::string source = {})
        : variant_(std::move(v)), source_(std::move(source)) {}

    Variant variant_;
    std::string source_;  // file name for tabulated laws read from disk
};

}  // namespace mfsim
