#pragma once

// Shared generators for randomized tests: small random decoders, layouts and
// intervention plans.

#include <string>
#include <vector>

#include "sinklab/intervene/plan.hpp"
#include "sinklab/rng.hpp"
#include "sinklab/tinylmm/forward.hpp"
#include "sinklab/tinylmm/model.hpp"

namespace sinklab::testing {

inline tinylmm::ModelConfig random_config(Rng& rng) {
    tinylmm::ModelConfig cfg;
    cfg.num_layers = rng.uniform_int(1, 3);
    cfg.num_heads = rng.uniform_int(1, 3);
    cfg.head_dim = rng.uniform_int(2, 8);
    cfg.model_dim = cfg.num_heads * cfg.head_dim;
    cfg.mlp_dim = rng.uniform_int(2, 12);
    cfg.vocab_size = rng.uniform_int(8, 24);
    cfg.max_seq_len = 64;
    cfg.norm_epsilon = 1e-6;
    return cfg;
}

inline void fill_gaussian(Matrix& m, Rng& rng, double stddev) {
    for (double& v : m.data()) v = rng.normal(0.0, stddev);
}

inline tinylmm::ModelBundle random_model(Rng& rng, const tinylmm::ModelConfig& cfg,
                                         const std::string& id = "test-model") {
    auto model = tinylmm::ModelBundle::zeros(cfg, id);
    const double emb_scale = 1.0;
    const double w_scale = 0.4 / std::sqrt(static_cast<double>(cfg.model_dim));
    fill_gaussian(model.token_embedding, rng, emb_scale);
    for (auto& layer : model.layers) {
        for (auto& head : layer.heads) {
            fill_gaussian(head.wq, rng, w_scale);
            fill_gaussian(head.wk, rng, w_scale);
            fill_gaussian(head.wv, rng, w_scale);
            fill_gaussian(head.wo, rng, w_scale);
        }
        fill_gaussian(layer.mlp_up, rng, w_scale);
        fill_gaussian(layer.mlp_down, rng, w_scale);
    }
    fill_gaussian(model.unembedding, rng, w_scale);
    return model;
}

inline tinylmm::ModelBundle random_model(Rng& rng) {
    const auto cfg = random_config(rng);
    return random_model(rng, cfg);
}

// BOS followed by a random mix with at least one visual and one text token.
inline tinylmm::TokenLayout random_layout(Rng& rng, int n) {
    std::vector<tinylmm::TokenRole> roles;
    roles.push_back(tinylmm::TokenRole::bos);
    for (int i = 1; i < n - 2; ++i) {
        roles.push_back(rng.next_double() < 0.6 ? tinylmm::TokenRole::visual
                                                : tinylmm::TokenRole::text);
    }
    if (n >= 2) roles.push_back(tinylmm::TokenRole::visual);
    if (n >= 3) roles.push_back(tinylmm::TokenRole::text);
    return tinylmm::TokenLayout(roles);
}

inline std::vector<int> random_ids(Rng& rng, int n, int vocab_size) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (auto& id : ids) id = rng.uniform_int(0, vocab_size - 1);
    return ids;
}

inline sinkdetect::SinkDimensionSet random_dims(Rng& rng, int model_dim, const std::string& id) {
    sinkdetect::SinkDimensionSet dims;
    dims.model_id = id;
    const int count = rng.uniform_int(1, std::min(2, model_dim));
    while (static_cast<int>(dims.dims.size()) < count) {
        dims.dims.insert(rng.uniform_int(0, model_dim - 1));
    }
    return dims;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

}  // namespace sinklab::testing
