#include "sinklab/metrics/background.hpp"

#include <stdexcept>

namespace sinklab::metrics {

BackgroundOverlap background_overlap(const std::set<int>& token_positions,
                                     const AnnotatedSample& sample) {
    sample.grid.validate();
    if (token_positions.empty()) {
        throw std::invalid_argument("background_overlap: empty position set, proportion undefined");
    }
    const int cells = sample.grid.cells();
    int on_background = 0;
    for (int pos : token_positions) {
        if (pos < 0 || pos >= cells) {
            throw std::invalid_argument("background_overlap: position " + std::to_string(pos) +
                                        " outside grid of " + std::to_string(cells) + " cells");
        }
        if (sample.grid.is_background(pos)) ++on_background;
    }
    int background_cells = 0;
    for (int c = 0; c < cells; ++c) {
        if (sample.grid.is_background(c)) ++background_cells;
    }
    BackgroundOverlap result;
    result.proportion = static_cast<double>(on_background) / static_cast<double>(token_positions.size());
    result.all_visual = static_cast<double>(background_cells) / static_cast<double>(cells);
    return result;
}

}  // namespace sinklab::metrics
