#pragma once

#include <cstdint>
#include <vector>

#include "sinklab/intervene/plan.hpp"
#include "sinklab/tinylmm/layout.hpp"
#include "sinklab/tinylmm/model.hpp"
#include "sinklab/tinylmm/trace.hpp"

namespace sinklab::tinylmm {

// One deterministic pass through the decoder. Intervention hooks run in a
// fixed order per layer: (1) planted activations are added to the layer
// input, (2) the mask overlay joins the causal mask inside the softmax,
// (3) VAR rewrites selected post-softmax rows. The trace keeps both the
// pre- and post-rewrite attention.
ForwardTrace forward(const ModelBundle& model, const std::vector<int>& token_ids,
                     const TokenLayout& layout, const intervene::InterventionPlan& plan);

struct GenerateResult {
    std::vector<int> generated_ids;
    std::vector<ForwardTrace> step_traces;  // one per generated token
    TokenLayout final_layout;
};

inline constexpr int kNoStopId = -1;

// Greedy decoding. The plan (VAR included) is re-applied at every step and
// sink sets are recomputed from the current hidden states; each generated
// token joins the layout with the text role.
GenerateResult generate(const ModelBundle& model, const std::vector<int>& prompt_ids,
                        const TokenLayout& layout, const intervene::InterventionPlan& plan,
                        int max_new_tokens, int stop_id = kNoStopId);

}  // namespace sinklab::tinylmm
