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
#include <random>
#include <sstream>
#include <vector>

#include "mfsim/density.hpp"
#include "mfsim/error.hpp"
#include "mfsim/grid.hpp"
#include "oracles.hpp"

using namespace mfsim;

namespace {

Density from_fn(double dx, double upper, double (*fn)(double)) {
    SpaceGrid grid(dx, upper);
    std::vector<double> v(grid.n_points());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(grid.x(j));
    return Density(grid, std::move(v));
}

double step2(double x) { return x <= 0.5 ? 2.0 : 0.0; }
double one(double) { return 1.0; }
double half_normal(double x) { return 2.0 * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double bump2(double x) { return std::exp(-0.5 * (x - 2.0) * (x - 2.0) / 0.04) / std::sqrt(2.0 * M_PI * 0.04); }

Density random_density(std::mt19937_64& rng, const SpaceGrid& grid) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(grid.n_points());
    for (auto& x : v) x = u(rng) < 0.3 ? 0.0 : u(rng) * 3.0;
    v.back() = 0.0;
    return Density(grid, std::move(v));
}

}  // namespace

TEST_CASE("time grid") {
    TimeGrid g(0.01, 100);
    CHECK(g.horizon() == doctest::Approx(1.0));
    CHECK(g.time(37) == 0.37);
    CHECK(TimeGrid::from_horizon(1e-3, 1.0).n_steps() == 1000);
    CHECK(TimeGrid::from_horizon(0.3, 1.0).n_steps() == 3);
    CHECK(g.refined() == TimeGrid(0.005, 200));
    CHECK_THROWS_AS(TimeGrid(0.0, 10), ValidationError);
    CHECK_THROWS_AS(TimeGrid(0.1, 0), ValidationError);
}

TEST_CASE("space grid") {
    SpaceGrid g(0.1, 1.0);
    CHECK(g.n_points() == 11);
    CHECK(g.last() == doctest::Approx(1.0));
    CHECK(g.weight(0) == doctest::Approx(0.05));
    CHECK(g.weight(5) == doctest::Approx(0.1));
    CHECK(g.weight(10) == doctest::Approx(0.05));
    CHECK_THROWS_AS(SpaceGrid(-0.1, 1.0), ValidationError);
}

TEST_CASE("density rejects bad values") {
    SpaceGrid g(0.5, 1.0);
    CHECK_THROWS_AS(Density(g, {1.0, -1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(Density(g, {1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(Density(g, {1.0, NAN, 0.0}), ValidationError);
    CHECK_THROWS_AS(Density(g, {1.0, 1.0, 0.0}, -0.1), ValidationError);
}

TEST_CASE("cdf of uniform and step densities") {
    const Density u = from_fn(0.001, 1.0, one);
    CHECK(std::abs(cdf(u, 0.5) - 0.5) < 1e-6);
    CHECK(cdf(u, 0.0) == 0.0);
    CHECK(cdf(u, 5.0) == doctest::Approx(total_mass(u)));

    const Density s = from_fn(0.001, 1.0, step2);
    CHECK(std::abs(cdf(s, 0.25) - 0.5) <= 0.001);
    CHECK(cdf(s, -1.0) == 0.0);

    const Density h = from_fn(0.01, 8.0, half_normal);
    for (double x : {0.1, 0.7, 1.3, 2.9}) {
        CHECK(std::abs(cdf(h, x) - (2.0 * oracle::Phi(x) - 1.0)) < 1e-4);
    }
}

TEST_CASE("total mass") {
    CHECK(std::abs(total_mass(from_fn(1e-3, 8.0, half_normal)) - 1.0) < 1e-4);
    CHECK(total_mass(Density(SpaceGrid(0.1, 1.0))) == 0.0);
    CHECK(std::abs(total_mass(from_fn(1e-3, 1.0, step2)) - 1.0) <= 1e-3 * (1.0 + 1e-9));
}

TEST_CASE("shift by zero is the identity") {
    const Density h = from_fn(0.01, 4.0, half_normal);
    const Density s = shift_density(h, 0.0);
    CHECK(std::vector<double>(s.values().begin(), s.values().end()) ==
          std::vector<double>(h.values().begin(), h.values().end()));
}

TEST_CASE("shift translates an indicator") {
    const double dx = 1e-3;
    const Density u = from_fn(dx, 1.0, one);
    const Density s = shift_density(u, 0.25);
    CHECK(std::abs(total_mass(s) - 0.75) <= dx);
    CHECK(s.at(0.0) == doctest::Approx(1.0));
    CHECK(s.at(0.7) == doctest::Approx(1.0));
    CHECK(s.at(0.8) == 0.0);
}

TEST_CASE("shift moves a bump") {
    const Density b = from_fn(1e-3, 4.0, bump2);
    const Density s = shift_density(b, 0.5);
    std::size_t arg = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s.value(j) > s.value(arg)) arg = j;
    CHECK(s.grid().x(arg) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(std::abs(total_mass(s) - total_mass(b)) < 1e-4);
    CHECK_THROWS_AS(shift_density(b, -0.1), ValidationError);
}

TEST_CASE("shift keeps the leaked mass") {
    SpaceGrid g(0.1, 1.0);
    Density d(g, std::vector<double>(g.n_points(), 1.0), 0.25);
    CHECK(shift_density(d, 0.3).leaked_mass() == 0.25);
}

TEST_CASE("cdf table matches cdf") {
    std::mt19937_64 rng(7);
    SpaceGrid g(0.05, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Density d = random_density(rng, g);
        CdfTable table(d);
        CHECK(table.total() == doctest::Approx(total_mass(d)));
        for (double x : {0.0, 0.013, 0.5, 1.234, 2.99, 3.5})
            CHECK(table(x) == doctest::Approx(cdf(d, x)).epsilon(1e-12));
    }
}

TEST_CASE("density csv round trip") {
    std::mt19937_64 rng(3);
    const Density d = random_density(rng, SpaceGrid(0.1, 2.0));
    std::stringstream ss;
    write_density_csv(ss, d);
    const Density r = read_density_csv(ss);
    CHECK(r.grid() == d.grid());
    CHECK(std::vector<double>(r.values().begin(), r.values().end()) ==
          std::vector<double>(d.values().begin(), d.values().end()));
    std::stringstream bad("x,value\n0,1\n0.1,oops\n");
    CHECK_THROWS_AS(read_density_csv(bad), ValidationError);
}

TEST_CASE("property: cdf is nondecreasing and bounded by the mass") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-0.5, 3.5);
    SpaceGrid g(0.02, 3.0);
    for (int rep = 0; rep < 200; ++rep) {
        const Density d = random_density(rng, g);
        double a = ux(rng), b = ux(rng);
        if (a > b) std::swap(a, b);
        CHECK(cdf(d, a) <= cdf(d, b) + 1e-15);
        CHECK(cdf(d, b) <= total_mass(d) + 1e-12);
    }
}

TEST_CASE("property: shifts compose and never add mass") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(0.0, 0.6);
    SpaceGrid g(0.01, 3.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Density d = random_density(rng, g);
        const double a = ud(rng), b = ud(rng);
        CHECK(total_mass(shift_density(d, a)) <= total_mass(d) + 1e-12);
        const Density two = shift_density(shift_density(d, a), b);
        const Density once = shift_density(d, a + b);
        CHECK(std::abs(total_mass(two) - total_mass(once)) < 4.0 * g.dx() * 3.0);
    }
}
