#pragma once

#include <string>
#include <vector>

#include "sinklab/matrix.hpp"

namespace sinklab::tinylmm {

struct ModelConfig {
    int num_layers = 0;
    int num_heads = 0;
    int model_dim = 0;
    int head_dim = 0;
    int mlp_dim = 0;
    int vocab_size = 0;
    int max_seq_len = 0;
    double norm_epsilon = 1e-6;

    void validate() const;
};

// One attention head's projections. wq/wk/wv are D x D_k, wo is D_k x D.
struct HeadWeights {
    Matrix wq;
    Matrix wk;
    Matrix wv;
    Matrix wo;
};

struct LayerWeights {
    std::vector<double> attn_norm_scale;  // D
    std::vector<HeadWeights> heads;       // H entries
    std::vector<double> mlp_norm_scale;   // D
    Matrix mlp_up;                        // D x mlp_dim
    Matrix mlp_down;                      // mlp_dim x D
};

// Full set of learned weights for the toy decoder. Pre-norm blocks with
// RMS-style scale-only normalization and a GELU MLP.
struct ModelBundle {
    ModelConfig config;
    std::string model_id;
    Matrix token_embedding;                // vocab_size x D
    std::vector<LayerWeights> layers;      // L entries
    std::vector<double> final_norm_scale;  // D
    Matrix unembedding;                    // D x vocab_size

    // Checks every matrix against the declared shapes and that all entries
    // are finite. Throws std::invalid_argument on violation.
    void validate() const;

    // A zero-initialized bundle of the right shapes (norm scales set to 1).
    static ModelBundle zeros(const ModelConfig& config, std::string model_id);
};

}  // namespace sinklab::tinylmm
