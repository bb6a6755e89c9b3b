#include "sinklab/tinylmm/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sinklab/intervene/heads.hpp"
#include "sinklab/intervene/redistribute.hpp"
#include "sinklab/tinylmm/attention.hpp"

namespace sinklab::tinylmm {

namespace {

// RMS-style normalization: x * scale / sqrt(mean(x^2) + eps), per token.
Matrix rms_norm(const Matrix& x, const std::vector<double>& scale, double eps) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double ms = 0.0;
        const double* in = x.row_ptr(i);
        for (std::size_t d = 0; d < x.cols(); ++d) ms += in[d] * in[d];
        ms /= static_cast<double>(x.cols());
        const double inv = 1.0 / std::sqrt(ms + eps);
        double* o = out.row_ptr(i);
        for (std::size_t d = 0; d < x.cols(); ++d) o[d] = in[d] * inv * scale[d];
    }
    return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

void validate_inputs(const ModelBundle& model, const std::vector<int>& token_ids,
                     const TokenLayout& layout, const intervene::InterventionPlan& plan) {
    const auto& cfg = model.config;
    if (static_cast<int>(token_ids.size()) != layout.size()) {
        throw std::invalid_argument("forward: token/layout length mismatch");
    }
    if (static_cast<int>(token_ids.size()) > cfg.max_seq_len) {
        throw std::invalid_argument("forward: sequence exceeds max_seq_len");
    }
    if (token_ids.empty()) throw std::invalid_argument("forward: empty sequence");
    for (int id : token_ids) {
        if (id < 0 || id >= cfg.vocab_size) {
            throw std::invalid_argument("forward: token id " + std::to_string(id) + " out of vocab");
        }
    }
    for (const auto& e : plan.overlay.entries()) {
        if (e.layer < 0 || e.layer >= cfg.num_layers) {
            throw std::invalid_argument("forward: overlay references layer out of range");
        }
        if (e.head != CausalMaskOverlay::kAllHeads && (e.head < 0 || e.head >= cfg.num_heads)) {
            throw std::invalid_argument("forward: overlay references head out of range");
        }
    }
    for (const auto& plant : plan.plants) {
        if (plant.layer_input < 0 || plant.layer_input >= cfg.num_layers) {
            throw std::invalid_argument("forward: plant references layer out of range");
        }
        if (plant.token < 0 || plant.token >= static_cast<int>(token_ids.size())) {
            throw std::invalid_argument("forward: plant references token out of range");
        }
    }
    if ((plan.var || !plan.plants.empty()) && !plan.dims) {
        throw std::invalid_argument("forward: plan needs sink dimensions for VAR/plants");
    }
    if (plan.dims) plan.dims->validate(cfg.model_dim);
    if (plan.var) plan.var->validate();
}

void apply_plants(Matrix& x, const intervene::InterventionPlan& plan, int layer_input) {
    for (const auto& plant : plan.plants) {
        if (plant.layer_input != layer_input) continue;
        auto row = x.row(static_cast<std::size_t>(plant.token));
        const double r = rms(row);
        const double value = plant.magnitude * r;
        for (int d : plan.dims->dims) x(static_cast<std::size_t>(plant.token), static_cast<std::size_t>(d)) += value;
    }
}

}  // namespace

ForwardTrace forward(const ModelBundle& model, const std::vector<int>& token_ids,
                     const TokenLayout& layout, const intervene::InterventionPlan& plan) {
    validate_inputs(model, token_ids, layout, plan);
    const auto& cfg = model.config;
    const std::size_t n = token_ids.size();
    const auto d = static_cast<std::size_t>(cfg.model_dim);

    ForwardTrace trace;
    trace.num_layers = cfg.num_layers;
    trace.num_heads = cfg.num_heads;
    trace.seq_len = static_cast<int>(n);
    trace.layer_inputs.reserve(static_cast<std::size_t>(cfg.num_layers));
    trace.attn_pre.resize(static_cast<std::size_t>(cfg.num_layers));
    trace.attn_post.resize(static_cast<std::size_t>(cfg.num_layers));

    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* e = model.token_embedding.row_ptr(static_cast<std::size_t>(token_ids[i]));
        double* o = x.row_ptr(i);
        for (std::size_t c = 0; c < d; ++c) o[c] = e[c];
    }

    for (int l = 0; l < cfg.num_layers; ++l) {
        auto& layer = model.layers[static_cast<std::size_t>(l)];

        // Hook 1: planted activations land on this layer's input.
        apply_plants(x, plan, l);
        trace.layer_inputs.push_back(x);

        const Matrix x_norm = rms_norm(x, layer.attn_norm_scale, cfg.norm_epsilon);

        // Per-layer sink picture, shared by every head's VAR rewrite.
        std::set<int> sinks;
        std::set<int> visual_sinks;
        const bool var_here = plan.var && !plan.var->layer_excluded(l, cfg.num_layers);
        if (var_here) {
            const auto& input = trace.layer_inputs.back();
            for (std::size_t j = 0; j < n; ++j) {
                const double phi = sinkdetect::sink_dimension_value(input.row(j), *plan.dims);
                if (phi >= plan.var->tau) {
                    sinks.insert(static_cast<int>(j));
                    if (layout.is_visual(static_cast<int>(j))) visual_sinks.insert(static_cast<int>(j));
                }
            }
        }

        Matrix attn_out(n, d);
        for (int h = 0; h < cfg.num_heads; ++h) {
            const auto& head = layer.heads[static_cast<std::size_t>(h)];
            const Matrix q = matmul(x_norm, head.wq);
            const Matrix k = matmul(x_norm, head.wk);
            const Matrix v = matmul(x_norm, head.wv);

            // Hook 2: overlay blocks join the causal mask inside the softmax.
            Matrix attn = attention_weights(q, k, plan.overlay, l, h);
            trace.attn_pre[static_cast<std::size_t>(l)].push_back(attn);

            // Hook 3: VAR rewrites selected text-query rows post-softmax.
            if (var_here && !sinks.empty()) {
                for (int i : layout.text_indices()) {
                    auto row = attn.row(static_cast<std::size_t>(i));
                    if (plan.var->head_selection_enabled) {
                        const double s = intervene::visual_attention_sum(row, layout);
                        const double r = intervene::visual_nonsink_ratio(row, layout, visual_sinks);
                        if (!intervene::head_query_selected(s, r, *plan.var)) continue;
                    }
                    auto result = intervene::redistribute_row(row, layout, sinks, visual_sinks,
                                                              plan.var->p, plan.var->target_mode);
                    trace.var_rows.push_back({l, h, i, result.rewritten, result.zero_target});
                    if (result.rewritten) {
                        double* dst = attn.row_ptr(static_cast<std::size_t>(i));
                        for (std::size_t j = 0; j < n; ++j) dst[j] = result.row[j];
                    }
                }
            }
            trace.attn_post[static_cast<std::size_t>(l)].push_back(attn);

            add_inplace(attn_out, matmul(matmul(attn, v), head.wo));
        }
        add_inplace(x, attn_out);

        const Matrix mlp_in = rms_norm(x, layer.mlp_norm_scale, cfg.norm_epsilon);
        Matrix hidden = matmul(mlp_in, layer.mlp_up);
        for (double& value : hidden.data()) value = gelu(value);
        add_inplace(x, matmul(hidden, layer.mlp_down));
    }

    trace.logits = matmul(rms_norm(x, model.final_norm_scale, cfg.norm_epsilon), model.unembedding);
    return trace;
}

GenerateResult generate(const ModelBundle& model, const std::vector<int>& prompt_ids,
                        const TokenLayout& layout, const intervene::InterventionPlan& plan,
                        int max_new_tokens, int stop_id) {
    if (max_new_tokens < 0) throw std::invalid_argument("generate: max_new_tokens must be >= 0");

    GenerateResult result;
    result.final_layout = layout;
    std::vector<int> ids = prompt_ids;
    for (int step = 0; step < max_new_tokens; ++step) {
        ForwardTrace trace = forward(model, ids, result.final_layout, plan);
        const auto last = static_cast<std::size_t>(trace.seq_len - 1);
        int best = 0;
        double best_logit = trace.logits(last, 0);
        for (std::size_t t = 1; t < trace.logits.cols(); ++t) {
            if (trace.logits(last, t) > best_logit) {
                best_logit = trace.logits(last, t);
                best = static_cast<int>(t);
            }
        }
        result.step_traces.push_back(std::move(trace));
        result.generated_ids.push_back(best);
        ids.push_back(best);
        result.final_layout.push_text();
        if (best == stop_id) break;
    }
    return result;
}

}  // namespace sinklab::tinylmm
