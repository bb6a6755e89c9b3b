#include "sinklab/tinylmm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sinklab::tinylmm {

namespace {

void check(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("ModelBundle: " + what);
}

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
    check(m.rows() == rows && m.cols() == cols,
          name + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
              ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

void check_finite(const Matrix& m, const std::string& name) {
    for (double v : m.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("ModelBundle: " + name + " has non-finite entries");
    }
}

void check_finite(const std::vector<double>& v, const std::string& name) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument("ModelBundle: " + name + " has non-finite entries");
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (num_layers < 1 || num_heads < 1 || model_dim < 1 || head_dim < 1 || mlp_dim < 1 ||
        vocab_size < 1 || max_seq_len < 1) {
        throw std::invalid_argument("ModelConfig: all dimensions must be >= 1");
    }
    if (model_dim != num_heads * head_dim) {
        throw std::invalid_argument("ModelConfig: model_dim must equal num_heads * head_dim");
    }
    if (!(norm_epsilon > 0.0)) {
        throw std::invalid_argument("ModelConfig: norm_epsilon must be positive");
    }
}

void ModelBundle::validate() const {
    config.validate();
    const auto d = static_cast<std::size_t>(config.model_dim);
    const auto dk = static_cast<std::size_t>(config.head_dim);
    const auto v = static_cast<std::size_t>(config.vocab_size);
    const auto mlp = static_cast<std::size_t>(config.mlp_dim);

    check_shape(token_embedding, v, d, "token_embedding");
    check_finite(token_embedding, "token_embedding");
    check(layers.size() == static_cast<std::size_t>(config.num_layers), "layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        const std::string prefix = "layers." + std::to_string(l) + ".";
        check(layer.attn_norm_scale.size() == d, prefix + "attn_norm_scale size");
        check(layer.mlp_norm_scale.size() == d, prefix + "mlp_norm_scale size");
        check_finite(layer.attn_norm_scale, prefix + "attn_norm_scale");
        check_finite(layer.mlp_norm_scale, prefix + "mlp_norm_scale");
        check(layer.heads.size() == static_cast<std::size_t>(config.num_heads),
              prefix + "head count mismatch");
        for (std::size_t h = 0; h < layer.heads.size(); ++h) {
            const auto& head = layer.heads[h];
            const std::string hp = prefix + "heads." + std::to_string(h) + ".";
            check_shape(head.wq, d, dk, hp + "wq");
            check_shape(head.wk, d, dk, hp + "wk");
            check_shape(head.wv, d, dk, hp + "wv");
            check_shape(head.wo, dk, d, hp + "wo");
            check_finite(head.wq, hp + "wq");
            check_finite(head.wk, hp + "wk");
            check_finite(head.wv, hp + "wv");
            check_finite(head.wo, hp + "wo");
        }
        check_shape(layer.mlp_up, d, mlp, prefix + "mlp_up");
        check_shape(layer.mlp_down, mlp, d, prefix + "mlp_down");
        check_finite(layer.mlp_up, prefix + "mlp_up");
        check_finite(layer.mlp_down, prefix + "mlp_down");
    }
    check(final_norm_scale.size() == d, "final_norm_scale size");
    check_finite(final_norm_scale, "final_norm_scale");
    check_shape(unembedding, d, v, "unembedding");
    check_finite(unembedding, "unembedding");
}

ModelBundle ModelBundle::zeros(const ModelConfig& config, std::string model_id) {
    config.validate();
    ModelBundle m;
    m.config = config;
    m.model_id = std::move(model_id);
    const auto d = static_cast<std::size_t>(config.model_dim);
    const auto dk = static_cast<std::size_t>(config.head_dim);
    m.token_embedding = Matrix(static_cast<std::size_t>(config.vocab_size), d);
    m.layers.resize(static_cast<std::size_t>(config.num_layers));
    for (auto& layer : m.layers) {
        layer.attn_norm_scale.assign(d, 1.0);
        layer.mlp_norm_scale.assign(d, 1.0);
        layer.heads.resize(static_cast<std::size_t>(config.num_heads));
        for (auto& head : layer.heads) {
            head.wq = Matrix(d, dk);
            head.wk = Matrix(d, dk);
            head.wv = Matrix(d, dk);
            head.wo = Matrix(dk, d);
        }
        layer.mlp_up = Matrix(d, static_cast<std::size_t>(config.mlp_dim));
        layer.mlp_down = Matrix(static_cast<std::size_t>(config.mlp_dim), d);
    }
    m.final_norm_scale.assign(d, 1.0);
    m.unembedding = Matrix(d, static_cast<std::size_t>(config.vocab_size));
    return m;
}

}  // namespace sinklab::tinylmm
