#pragma once

#include <vector>

#include "sinklab/matrix.hpp"

namespace sinklab::tinylmm {

// Outcome of one attempted redistribution of a text-query attention row.
struct VarRowRecord {
    int layer = 0;
    int head = 0;
    int query = 0;
    bool rewritten = false;
    // Budget existed but the target set carried zero weight; row left as-is.
    bool zero_target = false;
};

// Everything captured during one forward pass. Immutable after construction;
// safe to read from multiple threads.
struct ForwardTrace {
    int num_layers = 0;
    int num_heads = 0;
    int seq_len = 0;

    // layer_inputs[l] is x^{l-1}: the N x D hidden states entering layer l,
    // captured after planted-activation directives were applied.
    std::vector<Matrix> layer_inputs;

    // Post-softmax attention per layer/head (N x N). attn_pre holds the
    // weights before any post-softmax rewrite; attn_post holds the weights
    // the layer actually consumed.
    std::vector<std::vector<Matrix>> attn_pre;
    std::vector<std::vector<Matrix>> attn_post;

    Matrix logits;  // N x vocab_size

    std::vector<VarRowRecord> var_rows;
};

}  // namespace sinklab::tinylmm
