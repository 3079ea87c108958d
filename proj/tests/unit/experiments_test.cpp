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
#include <sstream>
#include <string>
#include <vector>

#include "mfsim/config.hpp"
#include "mfsim/error.hpp"
#include "mfsim/experiments.hpp"
#include "mfsim/heatmap.hpp"

using namespace mfsim;

namespace {

std::vector<int> pixels(const std::string& pgm, int& width, int& height) {
    std::istringstream in(pgm);
    std::string magic;
    int maxval = 0;
    in >> magic >> width >> height >> maxval;
    CHECK(magic == "P2");
    CHECK(maxval == 255);
    std::vector<int> px;
    int v;
    while (in >> v) px.push_back(v);
    return px;
}

}  // namespace

TEST_CASE("type 7 quantiles") {
    CHECK(sample_quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(sample_quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
    CHECK(sample_quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
    CHECK(sample_quantile({5.0}, 0.9) == 5.0);
    CHECK(sample_quantile({1.0, 2.0}, 1.0) == 2.0);
}

TEST_CASE("heatmap of an all-zero snapshot") {
    const SpaceGrid g(0.5, 1.0);
    std::ostringstream out;
    write_heatmap(out, {{0, Density(g)}});
    int w = 0, h = 0;
    CHECK(pixels(out.str(), w, h) == std::vector<int>{0, 0, 0});
    CHECK(w == 1);
    CHECK(h == 3);
}

TEST_CASE("heatmap of a constant density") {
    const SpaceGrid g(0.25, 1.0);
    std::ostringstream out;
    write_heatmap(out, {{0, Density(g, std::vector<double>(5, 0.7))}});
    int w = 0, h = 0;
    CHECK(pixels(out.str(), w, h) == std::vector<int>(5, 255));
}

TEST_CASE("two-column heatmap") {
    const SpaceGrid g(0.5, 1.0);
    std::ostringstream out;
    write_heatmap(out, {{0, Density(g, {4.0, 2.0, 0.0})}, {5, Density(g, {1.0, 3.0, 0.5})}});
    int w = 0, h = 0;
    const auto px = pixels(out.str(), w, h);
    CHECK(w == 2);
    CHECK(h == 3);
    // Top row is the upper node; levels are round(255 v / 4).
    CHECK(px == std::vector<int>{0, 32, 128, 191, 255, 64});
}

TEST_CASE("heatmap lines stay short and inputs are checked") {
    const SpaceGrid g(0.01, 1.0);
    std::vector<std::pair<std::size_t, Density>> snaps;
    for (std::size_t k = 0; k < 40; ++k) snaps.emplace_back(k, Density(g, std::vector<double>(g.n_points(), k + 1.0)));
    std::ostringstream out;
    write_heatmap(out, snaps);
    std::istringstream in(out.str());
    std::string line;
    while (std::getline(in, line)) CHECK(line.size() <= 70);
    CHECK_THROWS_AS(write_heatmap(out, {}), ValidationError);
    CHECK_THROWS_AS(write_heatmap(out, {{0, Density(g)}, {1, Density(SpaceGrid(0.5, 1.0))}}), ValidationError);
}

TEST_CASE("coupled run with a single size") {
    auto c = parse_config("", {{"alpha", "1"}, {"rho", "0.5"}, {"init", "dirac:2"}, {"dt", "0.01"},
                               {"dx", "0.02"}, {"upper", "6"}, {"t_final", "0.5"}});
    const auto report = run_coupled(c, {200}, 3);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].n_particles == 200);
    CHECK(report.rows[0].errors.size() == 3);
    std::ostringstream out;
    write_convergence_csv(out, report);
    CHECK(out.str().rfind("n,n_seeds,median_sup_error,iqr\n200,3,", 0) == 0);
    const auto again = run_coupled(c, {200, 200}, 3);
    CHECK(again.rows.size() == 1);
    CHECK(again.rows[0].errors == report.rows[0].errors);
}

TEST_CASE("decoupled errors shrink like one over root N") {
    auto c = parse_config("", {{"alpha", "0"}, {"init", "dirac:1"}, {"dt", "0.001"}, {"dx", "0.005"},
                               {"upper", "6"}, {"t_final", "1"}, {"threads", "1"}});
    const auto report = run_coupled(c, {100, 1000, 10000}, 20);
    REQUIRE(report.rows.size() == 3);
    for (std::size_t i = 0; i + 1 < 3; ++i) {
        const double ratio = report.rows[i].median_error / report.rows[i + 1].median_error;
        MESSAGE("N=" << report.rows[i].n_particles << " ratio " << ratio);
        CHECK(ratio > std::sqrt(10.0) / 2.0);
        CHECK(ratio < std::sqrt(10.0) * 2.0);
    }
}
