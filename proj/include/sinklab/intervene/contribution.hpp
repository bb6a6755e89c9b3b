#pragma once

#include "sinklab/sinkdetect/sinkdetect.hpp"
#include "sinklab/tinylmm/layout.hpp"
#include "sinklab/tinylmm/model.hpp"
#include "sinklab/tinylmm/trace.hpp"

namespace sinklab::intervene {

struct ContributionMeans {
    double sink_mean = 0.0;        // pairs (i in I_txt, j in visual sinks)
    double all_visual_mean = 0.0;  // pairs (i in I_txt, j in I_vis)
    std::size_t sink_pairs = 0;
    std::size_t all_visual_pairs = 0;
};

// Mean residual-stream contribution || alpha_{i,j} * x_j^{l-1} W_V W_O ||
// over text-query/visual-key pairs, accumulated across layers and heads.
// Uses the pre-intervention attention. Throws when either pair set is empty.
ContributionMeans attention_contribution(const tinylmm::ForwardTrace& trace,
                                         const tinylmm::ModelBundle& model,
                                         const tinylmm::TokenLayout& layout,
                                         const sinkdetect::SinkReport& report);

}  // namespace sinklab::intervene
