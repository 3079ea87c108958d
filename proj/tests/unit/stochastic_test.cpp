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
#include <stdexcept>
#include <vector>

#include "mfsim/error.hpp"
#include "mfsim/noise.hpp"
#include "mfsim/params.hpp"
#include "mfsim/philox.hpp"

using namespace mfsim;

TEST_CASE("philox known answers") {
    using rng::Counter;
    CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(rng::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(rng::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniform draws lie in the open unit interval") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const auto u = rng::uniform_pair({3, 1, i, 0});
        CHECK(u[0] > 0.0);
        CHECK(u[0] < 1.0);
        CHECK(u[1] > 0.0);
        CHECK(u[1] < 1.0);
    }
    CHECK(rng::standard_normal({1, 0, 5, 0}) != rng::standard_normal({1, 0, 5, 1}));
}

TEST_CASE("noise is reproducible") {
    const TimeGrid grid(0.01, 1000);
    const auto a = generate_noise(42, grid);
    const auto b = generate_noise(42, grid);
    CHECK(std::vector<double>(a.increments().begin(), a.increments().end()) ==
          std::vector<double>(b.increments().begin(), b.increments().end()));
    CHECK(a.increment(17) == brownian_increment(42, kCommonStream, 17, 0.01));
    CHECK(generate_noise(42, grid, 3).increment(0) != a.increment(0));
}

TEST_CASE("noise moments") {
    const double dt = 0.01;
    const std::size_t n = 1000000;
    const auto path = generate_noise(9, TimeGrid(dt, n));
    double s = 0.0, s2 = 0.0;
    for (double x : path.increments()) {
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(dt / n));
    CHECK(std::abs(var - dt) < 0.01 * dt);
}

TEST_CASE("different seeds are uncorrelated") {
    const std::size_t n = 100000;
    const TimeGrid grid(1.0, n);
    const auto a = generate_noise(1, grid);
    const auto b = generate_noise(2, grid);
    double sab = 0.0, saa = 0.0, sbb = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = a.increment(k), y = b.increment(k);
        sa += x;
        sb += y;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    const double cov = sab / n - sa / n * sb / n;
    const double r = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    CHECK(std::abs(r) < 0.01);
}

TEST_CASE("refined noise keeps the coarse increments") {
    const auto coarse = generate_noise(5, TimeGrid(0.02, 5000));
    const auto fine = coarse.refined();
    CHECK(fine.grid() == coarse.grid().refined());
    CHECK(fine.refinement_level() == 1);
    double s2 = 0.0;
    for (std::size_t k = 0; k < coarse.grid().n_steps(); ++k) {
        CHECK(fine.increment(2 * k) + fine.increment(2 * k + 1) ==
              doctest::Approx(coarse.increment(k)).epsilon(1e-14));
        s2 += fine.increment(2 * k) * fine.increment(2 * k);
    }
    CHECK(s2 / 5000.0 == doctest::Approx(0.01).epsilon(0.05));
    CHECK(fine.refined().refinement_level() == 2);
}

TEST_CASE("noise csv round trip") {
    const TimeGrid grid(0.1, 50);
    const auto path = generate_noise(8, grid);
    std::stringstream ss;
    write_noise_csv(ss, path);
    const auto back = read_noise_csv(ss, grid);
    CHECK(std::vector<double>(back.increments().begin(), back.increments().end()) ==
          std::vector<double>(path.increments().begin(), path.increments().end()));
    std::stringstream again;
    write_noise_csv(again, back);
    std::stringstream first;
    write_noise_csv(first, path);
    CHECK(again.str() == first.str());

    std::stringstream shortfile("k,increment\n0,0.1\n");
    CHECK_THROWS_AS(read_noise_csv(shortfile, grid), ValidationError);
}

TEST_CASE("forcing values") {
    const TimeGrid grid(0.01, 10);
    ModelParams p;
    const auto noise = NoisePath(grid, 0, 0, std::vector<double>(10, 0.1));
    const auto brownian = Forcing::brownian(noise);
    for (std::size_t k = 0; k < 10; ++k) CHECK(forcing_value(brownian, p, k) == 0.0);

    p.rho = 0.5;
    CHECK(forcing_value(brownian, p, 3) == doctest::Approx(0.05));

    const auto ramp = Forcing::deterministic(grid, [](double t) { return -t; });
    for (std::size_t k = 0; k < 10; ++k) CHECK(forcing_value(ramp, p, k) == doctest::Approx(-0.01));
    CHECK(ramp.initial_offset() == 0.0);
    CHECK_THROWS_AS(forcing_value(ramp, p, 10), std::out_of_range);

    const auto lifted = Forcing::deterministic(grid, [](double t) { return 0.2 - t; });
    CHECK(lifted.initial_offset() == doctest::Approx(0.2));
    CHECK(Forcing::none(grid).is_deterministic());
    CHECK(forcing_value(Forcing::none(grid), p, 4) == 0.0);
}

TEST_CASE("refined deterministic forcing interpolates") {
    const TimeGrid grid(0.1, 4);
    const auto f = Forcing::deterministic(grid, std::vector<double>{0.0, 0.2, 0.2, 0.6, 0.4});
    const auto r = f.refined();
    ModelParams p;
    CHECK(r.grid() == grid.refined());
    CHECK(forcing_value(r, p, 0) == doctest::Approx(0.1));
    CHECK(forcing_value(r, p, 2) == doctest::Approx(0.0));
    CHECK(forcing_value(r, p, 7) == doctest::Approx(-0.1));
    CHECK_THROWS_AS(Forcing::deterministic(grid, std::vector<double>{0.0, 1.0}), ValidationError);
}
