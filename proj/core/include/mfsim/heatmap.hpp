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
#include <string>
#include <utility>
#include <vector>

#include "mfsim/density.hpp"

namespace mfsim {

/// Plain PGM (P2): one column per snapshot in the given order, one row per
/// space node with the top row at the upper boundary. Gray level is
/// round(255 v / max) for the maximum over all snapshots (all 0 if max is 0).
/// Lines are wrapped at 70 characters.
void write_heatmap(std::ostream& out, const std::vector<std::pair<std::size_t, Density>>& snapshots);

/// Writes to `path`; throws std::runtime_error on I/O failure.
void emit_heatmap(const std::vector<std::pair<std::size_t, Density>>& snapshots,
                  const std::string& path);

}  // namespace mfsim
