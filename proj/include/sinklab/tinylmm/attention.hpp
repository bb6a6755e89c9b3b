#pragma once

#include "sinklab/matrix.hpp"
#include "sinklab/tinylmm/mask.hpp"

namespace sinklab::tinylmm {

// softmax(Q K^T / sqrt(D_k) + M) for one head. Q and K are N x D_k; the
// base mask is causal (j > i blocked) and the overlay contributes extra
// blocks for this (layer, head). Rows are stabilized by subtracting the max
// permitted score. Blocked entries come out exactly 0; a row whose every
// permitted key is blocked is an error, never NaN.
Matrix attention_weights(const Matrix& q, const Matrix& k, const CausalMaskOverlay& overlay,
                         int layer, int head);

// No overlay.
Matrix attention_weights(const Matrix& q, const Matrix& k);

}  // namespace sinklab::tinylmm
