#include "sinklab/intervene/knockout.hpp"

#include <stdexcept>

#include "sinklab/rng.hpp"

namespace sinklab::intervene {

using tinylmm::CausalMaskOverlay;
using tinylmm::TokenLayout;

CausalMaskOverlay knockout_mask(const TokenLayout& layout, const sinkdetect::SinkReport& report) {
    CausalMaskOverlay overlay;
    for (int l = 0; l < report.num_layers(); ++l) {
        for (int j : report.visual_sinks[static_cast<std::size_t>(l)]) {
            for (int i : layout.text_indices()) {
                overlay.block_all_heads(l, i, j);
            }
        }
    }
    return overlay;
}

CausalMaskOverlay random_knockout_mask(const TokenLayout& layout,
                                       const std::vector<int>& per_layer_counts,
                                       std::uint64_t seed) {
    const auto& pool = layout.visual_indices();
    Rng rng = Rng::substream(seed, "random-knockout");
    CausalMaskOverlay overlay;
    for (std::size_t l = 0; l < per_layer_counts.size(); ++l) {
        const int count = per_layer_counts[l];
        if (count < 0 || count > static_cast<int>(pool.size())) {
            throw std::invalid_argument("random_knockout_mask: layer " + std::to_string(l) +
                                        " count " + std::to_string(count) + " exceeds visual pool of " +
                                        std::to_string(pool.size()));
        }
        // Fresh draw per layer.
        const auto picks = rng.sample_without_replacement(static_cast<int>(pool.size()), count);
        for (int idx : picks) {
            const int j = pool[static_cast<std::size_t>(idx)];
            for (int i : layout.text_indices()) {
                overlay.block_all_heads(static_cast<int>(l), i, j);
            }
        }
    }
    return overlay;
}

}  // namespace sinklab::intervene
