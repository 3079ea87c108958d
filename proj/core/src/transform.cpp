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

#include "mfsim/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mfsim/error.hpp"

namespace mfsim {

namespace {
// Linear f is well defined past 1; allow round-off in accumulated losses.
constexpr double kLinearSlack = 1e-6;
}  // namespace

LossTransform LossTransform::linear() { return LossTransform(Kind::Linear, 1.0); }

LossTransform LossTransform::neg_log(double l_max) {
    if (!(l_max > 0.0 && l_max < 1.0)) {
        throw ValidationError(fmt::format("neglog transform: l_max must lie in (0,1), got {}", l_max));
    }
    return LossTransform(Kind::NegLog, l_max);
}

LossTransform LossTransform::reciprocal(double l_max) {
    if (!(l_max > 0.0 && l_max < 1.0)) {
        throw ValidationError(
            fmt::format("reciprocal transform: l_max must lie in (0,1), got {}", l_max));
    }
    return LossTransform(Kind::Reciprocal, l_max);
}

LossTransform LossTransform::tabulated(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size()) {
        throw ValidationError("tabulated transform: need >= 2 nodes and one value per node");
    }
    if (nodes.front() != 0.0 || nodes.back() > 1.0) {
        throw ValidationError("tabulated transform: nodes must start at 0 and end at most at 1");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1])) {
            throw ValidationError("tabulated transform: nodes must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError("tabulated transform: values must be finite");
        }
        if (i > 0 && values[i] < values[i - 1]) {
            throw ValidationError("tabulated transform: values must be nondecreasing");
        }
    }
    LossTransform t(Kind::Tabulated, nodes.back());
    t.nodes_ = std::move(nodes);
    t.values_ = std::move(values);
    return t;
}

LossTransform LossTransform::parse(std::string_view name, double l_max) {
    if (name == "linear") return linear();
    if (name == "neglog") return neg_log(l_max);
    if (name == "reciprocal") return reciprocal(l_max);
    throw ValidationError(fmt::format(
        "transform: unknown transform '{}' (expected linear, neglog or reciprocal)", name));
}

std::string LossTransform::name() const {
    switch (kind_) {
        case Kind::Linear: return "linear";
        case Kind::NegLog: return "neglog";
        case Kind::Reciprocal: return "reciprocal";
        case Kind::Tabulated: return "tabulated";
    }
    return "unknown";
}

double LossTransform::domain_end() const {
    return kind_ == Kind::Linear ? 1.0 : l_max_;
}

double LossTransform::max_slope() const {
    switch (kind_) {
        case Kind::Linear: return 1.0;
        case Kind::NegLog:
        case Kind::Reciprocal: return std::numeric_limits<double>::infinity();
        case Kind::Tabulated: {
            double slope = 0.0;
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                slope = std::max(slope, (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]));
            }
            return slope;
        }
    }
    return 0.0;
}

double LossTransform::min_slope() const {
    if (kind_ != Kind::Tabulated) return 1.0;  // f'(0) = 1 and f' is nondecreasing otherwise
    double slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        slope = std::min(slope, (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]));
    }
    return slope;
}

double LossTransform::moment_limit() const {
    switch (kind_) {
        case Kind::Linear: return 0.5;
        case Kind::NegLog: return 1.0;
        case Kind::Reciprocal: return std::numeric_limits<double>::infinity();
        case Kind::Tabulated: {
            const double end = nodes_.back();
            return antiderivative(end) + (1.0 - end) * values_.back();
        }
    }
    return 0.0;
}

void LossTransform::check_domain(double loss) const {
    if (!(loss >= 0.0)) {
        throw DomainError(fmt::format("{} transform: loss {} is negative", name(), loss));
    }
    if (kind_ == Kind::Linear) {
        if (loss > 1.0 + kLinearSlack) {
            throw DomainError(fmt::format("linear transform: loss {} exceeds 1", loss));
        }
        return;
    }
    if (singular() ? loss >= l_max_ : loss > l_max_) {
        throw DomainError(fmt::format("{} transform: loss {} is at or beyond the cap L_max = {}",
                                      name(), loss, l_max_));
    }
}

double LossTransform::value(double loss) const {
    check_domain(loss);
    switch (kind_) {
        case Kind::Linear: return loss;
        case Kind::NegLog: return -std::log1p(-loss);
        case Kind::Reciprocal: return 1.0 / (1.0 - loss);
        case Kind::Tabulated: {
            const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), loss);
            if (it == nodes_.end()) return values_.back();
            const auto i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
            const double w = (loss - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
            return values_[i] + w * (values_[i + 1] - values_[i]);
        }
    }
    return 0.0;
}

double LossTransform::antiderivative(double loss) const {
    check_domain(loss);
    switch (kind_) {
        case Kind::Linear: return 0.5 * loss * loss;
        case Kind::NegLog: {
            const double rest = 1.0 - loss;
            return rest > 0.0 ? rest * std::log(rest) + loss : 1.0;
        }
        case Kind::Reciprocal: return -std::log1p(-loss);
        case Kind::Tabulated: {
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                if (loss <= nodes_[i]) break;
                const double hi = std::min(loss, nodes_[i + 1]);
                const double f_hi = value(hi);
                sum += 0.5 * (hi - nodes_[i]) * (values_[i] + f_hi);
            }
            return sum;
        }
    }
    return 0.0;
}

}  // namespace mfsim
