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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfsim/grid.hpp"

namespace mfsim {

/// Tabulated sub-probability density on a truncated spatial grid.
///
/// Values are node samples of a nonnegative function on [0, upper]; the
/// density is understood as the piecewise-linear interpolant of those
/// samples, so every quadrature below integrates that interpolant exactly.
/// `leaked_mass` records mass that has left through the upper truncation
/// boundary and is never folded into the loss.
class Density {
public:
    /// All-zero density.
    explicit Density(SpaceGrid grid, double leaked_mass = 0.0);
    Density(SpaceGrid grid, std::vector<double> values, double leaked_mass = 0.0);

    const SpaceGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t j) const { return values_[j]; }
    double leaked_mass() const { return leaked_mass_; }
    std::size_t size() const { return values_.size(); }

    /// Linear interpolation of the node values; zero outside [0, last node].
    double at(double x) const;

    Density with_leaked_mass(double leaked) const;

private:
    SpaceGrid grid_;
    std::vector<double> values_;
    double leaked_mass_;
};

/// Trapezoid integral over the whole grid.
double total_mass(const Density& density);

/// Integral of the density over [0, min(x, upper)]; zero for x <= 0.
double cdf(const Density& density, double x);

double sup_norm(const Density& density);

/// Translate towards the origin: result(x) = density(x + delta). Mass pushed
/// below zero is dropped; nodes whose preimage lies beyond the last node get
/// zero. Requires delta >= 0. The trapezoid mass cannot grow as long as the
/// value at the last node is zero.
Density shift_density(const Density& density, double delta);

/// Prefix-sum table for repeated CDF evaluations of one density.
class CdfTable {
public:
    explicit CdfTable(const Density& density);

    double operator()(double x) const;
    double total() const { return cumulative_.back(); }

private:
    double dx_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

/// CSV with header `x,value`, 17 significant digits.
void write_density_csv(std::ostream& out, const Density& density);
/// Reads `x,value` rows. The nodes must be uniformly spaced from 0.
Density read_density_csv(std::istream& in);

}  // namespace mfsim
