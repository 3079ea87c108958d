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

#include <cmath>

namespace mfsim::numeric {

inline constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double z);
/// P(Z <= z) for a standard normal Z, accurate in both tails.
double normal_cdf(double z);
/// P(Z > z).
double normal_sf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Centred Gaussian density with the given variance.
inline double gaussian_kernel(double z, double variance) {
    return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * kPi * variance);
}

}  // namespace mfsim::numeric
