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

#include <string>
#include <string_view>
#include <vector>

namespace mfsim {

/// The loss transform f in X_t = X_0 + B_t - alpha f(L_t), with its
/// antiderivative F(x) = int_0^x f.
///
/// NegLog and Reciprocal blow up as L -> 1 and are only evaluated below the
/// cap `l_max` (default 1 - 1e-6).
class LossTransform {
public:
    enum class Kind { Linear, NegLog, Reciprocal, Tabulated };

    static constexpr double kDefaultLMax = 1.0 - 1e-6;

    static LossTransform linear();
    static LossTransform neg_log(double l_max = kDefaultLMax);
    static LossTransform reciprocal(double l_max = kDefaultLMax);
    /// Piecewise-linear f through (nodes[i], values[i]); nodes strictly
    /// increasing, starting at 0, ending at most at 1; values nondecreasing.
    static LossTransform tabulated(std::vector<double> nodes, std::vector<double> values);

    /// Parses `linear`, `neglog` or `reciprocal`.
    static LossTransform parse(std::string_view name, double l_max = kDefaultLMax);

    Kind kind() const { return kind_; }
    std::string name() const;
    bool singular() const { return kind_ == Kind::NegLog || kind_ == Kind::Reciprocal; }
    double l_max() const { return l_max_; }

    /// f(L). Throws DomainError outside the transform's domain.
    double value(double loss) const;
    /// F(L) = int_0^L f.
    double antiderivative(double loss) const;
    /// f(loss + step) - f(loss).
    double increment(double loss, double step) const {
        return value(loss + step) - value(loss);
    }
    /// Largest loss at which value() is defined.
    double domain_end() const;

    /// sup and inf of f' over the domain (+infinity for singular transforms).
    double max_slope() const;
    double min_slope() const;

    /// lim F(L) + (1 - L) f(L) as L approaches the end of the domain:
    /// 1/2 for Linear, 1 for NegLog, +infinity for Reciprocal.
    double moment_limit() const;

private:
    LossTransform(Kind kind, double l_max) : kind_(kind), l_max_(l_max) {}

    void check_domain(double loss) const;

    Kind kind_;
    double l_max_;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

}  // namespace mfsim
