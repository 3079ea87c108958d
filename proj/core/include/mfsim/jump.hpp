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
#include <functional>

#include "mfsim/density.hpp"

namespace mfsim {

/// inf{x > 0 : cdf(alpha x) < x}: the minimal jump size selected by the
/// physical jump condition, for a nondecreasing `cdf` with cdf(inf) =
/// remaining_mass <= 1.
///
/// The sign of g(x) = cdf(alpha x) - x is scanned on `scan_points` nodes of
/// (0, remaining_mass + h], then the first sign change is bisected to 1e-12.
/// Returns 0 when g is already negative at the first scan node.
double jump_size_minimal(const std::function<double(double)>& cdf, double alpha,
                         double remaining_mass, std::size_t scan_points = 4096);

/// Convenience overload for a tabulated density.
double jump_size_minimal(const Density& density, double alpha);

}  // namespace mfsim
