#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "sinklab/intervene/var_params.hpp"
#include "sinklab/sinkdetect/sinkdetect.hpp"
#include "sinklab/tinylmm/layout.hpp"
#include "sinklab/tinylmm/mask.hpp"
#include "sinklab/tinylmm/trace.hpp"

namespace sinklab::intervene {

// Per (layer, head, text query) selection state.
struct HeadSelection {
    struct Entry {
        int layer = 0;
        int head = 0;
        int query = 0;
        double visual_sum = 0.0;  // s: total attention mass on I_vis
        double ratio = 0.0;       // r: visual non-sink share of that mass
        bool selected = false;
    };

    int num_layers = 0;
    int num_heads = 0;
    std::vector<Entry> entries;  // ordered by (layer, head, query)
};

// Sum of one attention row's weights over the visual tokens.
double visual_attention_sum(std::span<const double> row, const tinylmm::TokenLayout& layout);

// r = sum over visual non-sink keys / sum over all visual keys. Returns 0
// when the query carries no visual attention at all (such heads always fail
// the gate anyway).
double visual_nonsink_ratio(std::span<const double> row, const tinylmm::TokenLayout& layout,
                            const std::set<int>& visual_sinks);

// A (layer, head, query) triple is image-centric iff s >= gate and r >= rho.
bool head_query_selected(double visual_sum, double ratio, const VarParams& params);

// Post-hoc selection over a recorded trace, using the pre-intervention
// attention. Excluded layers get entries with selected=false.
HeadSelection select_image_centric(const tinylmm::ForwardTrace& trace,
                                   const tinylmm::TokenLayout& layout,
                                   const sinkdetect::SinkReport& report, const VarParams& params);

// Blocks (text query, visual key) pairs in every selected head, or in every
// unselected head when complement is set. A head counts as selected when any
// of its query triples is.
tinylmm::CausalMaskOverlay ich_ablation_mask(const HeadSelection& selection,
                                             const tinylmm::TokenLayout& layout, bool complement);

// Number of selected (layer, head) pairs per text query token.
std::map<int, int> count_image_centric_heads(const HeadSelection& selection);

}  // namespace sinklab::intervene
