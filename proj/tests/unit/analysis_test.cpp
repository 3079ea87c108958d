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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mfsim/analysis.hpp"
#include "mfsim/error.hpp"
#include "mfsim/solver.hpp"
#include "oracles.hpp"

using namespace mfsim;

namespace {

LossPath path_of(const TimeGrid& g, const std::vector<double>& values) {
    LossPath p(g);
    for (std::size_t k = 1; k < values.size(); ++k) p.push(values[k]);
    return p;
}

}  // namespace

TEST_CASE("curb time") {
    const TimeGrid g(0.01, 100);
    ModelParams p;
    CHECK(curb_time(p, g) == doctest::Approx(1.0 / (2.0 * M_PI)));
    CHECK(curb_time(p, g) == doctest::Approx(0.15915).epsilon(1e-4));
    p.rho = 0.6;
    CHECK(curb_time(p, g) == doctest::Approx(0.24868).epsilon(1e-4));
    p.alpha = 0.0;
    CHECK(curb_time(p, g) == 0.0);
    p.alpha = 2.0;
    p.rho = 0.0;
    p.sigma = 2.0;
    CHECK(curb_time(p, g) == doctest::Approx(4.0 / (2.0 * M_PI * 4.0)));
    p.transform = LossTransform::reciprocal();
    CHECK(std::isinf(curb_time(p, g)));
}

TEST_CASE("static verdicts") {
    const TimeGrid g(0.01, 100);
    ModelParams p;
    CHECK(static_verdict(InitialCondition::uniform(0.1, 0.4), p, g).value == Verdict::MustBlowUp);
    CHECK(static_verdict(InitialCondition::dirac(2.0), p, g).value == Verdict::NeverBlowsUp);
    CHECK(static_verdict(InitialCondition::uniform(0.5, 1.6111), p, g).value == Verdict::NeverBlowsUp);
    CHECK(static_verdict(InitialCondition::dirac(0.4), p, g).value == Verdict::MustBlowUp);
    CHECK(static_verdict(InitialCondition::dirac(0.8), p, g).value == Verdict::Indeterminate);
    p.rho = 0.5;
    CHECK(static_verdict(InitialCondition::dirac(0.4), p, g).value == Verdict::Indeterminate);
    p.rho = 0.0;
    p.alpha = 0.0;
    CHECK(static_verdict(InitialCondition::dirac(0.01), p, g).value == Verdict::NeverBlowsUp);
}

TEST_CASE("property: static verdict criteria never disagree") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const TimeGrid g(0.01, 100);
    for (int rep = 0; rep < 2000; ++rep) {
        ModelParams p;
        p.alpha = 3.0 * u(rng);
        const double a = 0.01 + 3.0 * u(rng);
        const double b = a + 0.01 + 3.0 * u(rng);
        const auto v = static_verdict(InitialCondition::uniform(a, b), p, g);
        bool must = false, never = false;
        for (const auto& row : v.criteria) {
            if (!row.fires) continue;
            if (row.name.find("below-alpha/2") != std::string::npos || row.name.find("mean") != std::string::npos)
                must = true;
            else
                never = true;
        }
        CHECK_FALSE((must && never));
        if (v.value == Verdict::MustBlowUp) CHECK((a + b) / 2 < 0.5 * p.alpha + 1e-12);
    }
}

TEST_CASE("moment criterion") {
    ModelParams p;
    CHECK(moment_criterion(0.4, p, 1.0));
    CHECK_FALSE(moment_criterion(0.6, p, 1.0));
    CHECK_FALSE(moment_criterion(0.01, p, 0.0));
    CHECK(moment_rhs(p, 0.5) == doctest::Approx(0.125 + 0.25));
    CHECK_THROWS_AS(moment_criterion(0.4, p, 1.5), DomainError);

    p.transform = LossTransform::reciprocal();
    CHECK(moment_criterion(10.0, p, 0.9999989));
    CHECK_FALSE(moment_criterion(10.0, p, 0.5));
    p.alpha = 0.1;
    CHECK(moment_criterion(1.0, p, 0.9999989));
    CHECK_THROWS_AS(moment_criterion(1.0, p, 1.0), DomainError);
}

TEST_CASE("property: moment right-hand side is nondecreasing in the loss") {
    for (const auto& f : {LossTransform::linear(), LossTransform::neg_log(), LossTransform::reciprocal()}) {
        ModelParams p;
        p.transform = f;
        double prev = moment_rhs(p, 0.0);
        for (int i = 1; i < 1000; ++i) {
            const double cur = moment_rhs(p, 0.999 * i / 1000.0);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("wilson interval") {
    for (auto [k, n] : {std::pair<std::size_t, std::size_t>{0, 10}, {3, 10}, {10, 10}, {57, 200}}) {
        const auto [lo, hi] = wilson_interval(k, n);
        const auto [olo, ohi] = oracle::wilson(static_cast<double>(k), static_cast<double>(n), 1.959963984540054);
        CHECK(lo == doctest::Approx(olo).epsilon(1e-12));
        CHECK(hi == doctest::Approx(ohi).epsilon(1e-12));
        CHECK(lo <= static_cast<double>(k) / n);
        CHECK(hi >= static_cast<double>(k) / n);
    }
    CHECK(wilson_interval(0, 10).second == doctest::Approx(0.2775).epsilon(1e-3));
}

TEST_CASE("blow-up probability without common noise") {
    ModelParams p;
    SolverConfig cfg(TimeGrid(1e-3, 1000), SpaceGrid(0.01, 6.0));
    const auto near = estimate_blowup_probability(p, InitialCondition::dirac(0.4), cfg, 10, 1);
    CHECK(near.deterministic);
    CHECK(near.n_blowups == 10);
    CHECK(near.p_hat == 1.0);
    const auto far = estimate_blowup_probability(p, InitialCondition::dirac(2.0), cfg, 10, 1);
    CHECK(far.n_blowups == 0);
    CHECK(far.p_hat == 0.0);
    CHECK(far.hi > 0.0);
}

TEST_CASE("blow-up probability is reproducible") {
    ModelParams p;
    p.rho = 0.5;
    SolverConfig cfg(TimeGrid(2e-3, 250), SpaceGrid(0.01, 6.0));
    const auto a = estimate_blowup_probability(p, InitialCondition::dirac(0.6), cfg, 6, 3, 1);
    const auto b = estimate_blowup_probability(p, InitialCondition::dirac(0.6), cfg, 6, 3, 2);
    CHECK_FALSE(a.deterministic);
    CHECK(a.n_blowups == b.n_blowups);
    CHECK(a.n_paths == 6);
}

TEST_CASE("loss ordering") {
    const TimeGrid g(0.1, 4);
    const auto a = path_of(g, {0.0, 0.1, 0.2, 0.2, 0.5});
    const auto same = compare_losses(a, a, 4);
    CHECK(same.ordered);
    CHECK(same.identical);
    const auto zero = path_of(g, {0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(compare_losses(zero, a, 4).ordered);
    const auto rev = compare_losses(a, zero, 4);
    CHECK_FALSE(rev.ordered);
    CHECK(rev.first_violation == 1);
    CHECK(rev.max_excess == doctest::Approx(0.5));
    CHECK(compare_losses(a, zero, 4, 0.6).ordered);
    CHECK(compare_losses(a, zero, 0).ordered);
    CHECK_THROWS_AS(compare_losses(a, path_of(TimeGrid(0.2, 4), {0, 0, 0, 0, 0}), 2), ValidationError);
    CHECK_THROWS_AS(compare_losses(a, a, 5), ValidationError);
}
