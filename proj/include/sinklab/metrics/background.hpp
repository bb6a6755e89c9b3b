#pragma once

#include <set>

#include "sinklab/metrics/annotations.hpp"

namespace sinklab::metrics {

struct BackgroundOverlap {
    double proportion = 0.0;   // share of the given positions on background
    double all_visual = 0.0;   // baseline: share of all grid cells on background
};

// Positions are grid cell indices (visual token j <-> cell j). Empty
// position sets and out-of-bounds cells are errors.
BackgroundOverlap background_overlap(const std::set<int>& token_positions,
                                     const AnnotatedSample& sample);

}  // namespace sinklab::metrics
