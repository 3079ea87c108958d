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

#include "mfsim/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mfsim/error.hpp"

namespace mfsim {

void write_heatmap(std::ostream& out,
                   const std::vector<std::pair<std::size_t, Density>>& snapshots) {
    if (snapshots.empty()) throw ValidationError("heatmap: needs at least one snapshot");
    const SpaceGrid& grid = snapshots.front().second.grid();
    double max_value = 0.0;
    for (const auto& [k, d] : snapshots) {
        if (!(d.grid() == grid)) throw ValidationError("heatmap: snapshots on different grids");
        max_value = std::max(max_value, sup_norm(d));
    }
    const std::size_t width = snapshots.size();
    const std::size_t height = grid.n_points();

    out << "P2\n" << width << ' ' << height << "\n255\n";
    std::string line;
    auto flush = [&] {
        if (!line.empty()) out << line << '\n';
        line.clear();
    };
    for (std::size_t row = 0; row < height; ++row) {
        const std::size_t j = height - 1 - row;
        for (const auto& [k, d] : snapshots) {
            int level = 0;
            if (max_value > 0.0) {
                level = static_cast<int>(std::lround(255.0 * d.value(j) / max_value));
            }
            const std::string token = std::to_string(level);
            if (!line.empty() && line.size() + 1 + token.size() > 70) flush();
            if (!line.empty()) line += ' ';
            line += token;
        }
        flush();
    }
}

void emit_heatmap(const std::vector<std::pair<std::size_t, Density>>& snapshots,
                  const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("heatmap: cannot open " + path);
    write_heatmap(out, snapshots);
    if (!out) throw std::runtime_error("heatmap: write failed for " + path);
}

}  // namespace mfsim
