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

#include "mfsim/jump.hpp"

#include <algorithm>

#include "mfsim/error.hpp"

namespace mfsim {

double jump_size_minimal(const std::function<double(double)>& cdf, double alpha,
                         double remaining_mass, std::size_t scan_points) {
    if (!(remaining_mass >= 0.0 && remaining_mass <= 1.0 + 1e-12)) {
        throw ValidationError("jump_size_minimal: remaining mass must lie in [0, 1]");
    }
    if (!(alpha >= 0.0)) throw ValidationError("jump_size_minimal: alpha must be >= 0");
    if (scan_points < 2) throw ValidationError("jump_size_minimal: need at least two scan points");

    auto g = [&](double x) { return cdf(alpha * x) - x; };
    // g(remaining_mass + h) < 0 always, so the scan range brackets the answer.
    const double h = std::max(remaining_mass, 1e-12) / static_cast<double>(scan_points - 1);
    if (g(h) < 0.0) return 0.0;

    double lo = h;
    double hi = h;
    for (std::size_t i = 2; i <= scan_points + 1; ++i) {
        hi = h * static_cast<double>(i);
        if (g(hi) < 0.0) break;
        lo = hi;
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) hi = mid; else lo = mid;
    }
    return hi;
}

double jump_size_minimal(const Density& density, double alpha) {
    const CdfTable table(density);
    return jump_size_minimal([&](double x) { return table(x); }, alpha, std::min(1.0, table.total()));
}

}  // namespace mfsim
