#pragma once

#include <cstdint>
#include <vector>

#include "sinklab/sinkdetect/sinkdetect.hpp"
#include "sinklab/tinylmm/layout.hpp"
#include "sinklab/tinylmm/mask.hpp"

namespace sinklab::intervene {

// Attention knockout of the visual sink tokens: blocks (i, j) for every
// text query i and every visual sink j at each layer, across all heads.
tinylmm::CausalMaskOverlay knockout_mask(const tinylmm::TokenLayout& layout,
                                         const sinkdetect::SinkReport& report);

// Control arm: at each layer, blocks an independent uniform sample (without
// replacement) of visual tokens of the given size toward all text queries.
// Deterministic given the seed.
tinylmm::CausalMaskOverlay random_knockout_mask(const tinylmm::TokenLayout& layout,
                                                const std::vector<int>& per_layer_counts,
                                                std::uint64_t seed);

}  // namespace sinklab::intervene
