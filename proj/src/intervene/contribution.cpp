#include "sinklab/intervene/contribution.hpp"

#include <stdexcept>

namespace sinklab::intervene {

ContributionMeans attention_contribution(const tinylmm::ForwardTrace& trace,
                                         const tinylmm::ModelBundle& model,
                                         const tinylmm::TokenLayout& layout,
                                         const sinkdetect::SinkReport& report) {
    if (report.num_layers() != trace.num_layers) {
        throw std::invalid_argument("attention_contribution: report does not match trace");
    }
    const auto& txt = layout.text_indices();
    const auto& vis = layout.visual_indices();
    if (txt.empty() || vis.empty()) {
        throw std::invalid_argument("attention_contribution: needs text queries and visual keys");
    }

    double sink_sum = 0.0;
    std::size_t sink_pairs = 0;
    double all_sum = 0.0;
    std::size_t all_pairs = 0;

    for (int l = 0; l < trace.num_layers; ++l) {
        const Matrix& input = trace.layer_inputs[static_cast<std::size_t>(l)];
        const auto& visual_sinks = report.visual_sinks[static_cast<std::size_t>(l)];
        for (int h = 0; h < trace.num_heads; ++h) {
            const auto& head = model.layers[static_cast<std::size_t>(l)].heads[static_cast<std::size_t>(h)];
            // || x_j W_V W_O || per visual key, shared across queries.
            std::vector<double> key_norm(vis.size());
            for (std::size_t jj = 0; jj < vis.size(); ++jj) {
                const auto j = static_cast<std::size_t>(vis[jj]);
                std::vector<double> value(head.wv.cols(), 0.0);
                const double* x = input.row_ptr(j);
                for (std::size_t d = 0; d < head.wv.rows(); ++d) {
                    const double s = x[d];
                    if (s == 0.0) continue;
                    for (std::size_t c = 0; c < head.wv.cols(); ++c) value[c] += s * head.wv(d, c);
                }
                std::vector<double> written(head.wo.cols(), 0.0);
                for (std::size_t d = 0; d < head.wo.rows(); ++d) {
                    const double s = value[d];
                    if (s == 0.0) continue;
                    for (std::size_t c = 0; c < head.wo.cols(); ++c) written[c] += s * head.wo(d, c);
                }
                key_norm[jj] = l2_norm(written);
            }
            const Matrix& attn = trace.attn_pre[static_cast<std::size_t>(l)][static_cast<std::size_t>(h)];
            for (int i : txt) {
                for (std::size_t jj = 0; jj < vis.size(); ++jj) {
                    const int j = vis[jj];
                    const double c = attn(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * key_norm[jj];
                    all_sum += c;
                    ++all_pairs;
                    if (visual_sinks.count(j)) {
                        sink_sum += c;
                        ++sink_pairs;
                    }
                }
            }
        }
    }

    if (sink_pairs == 0) {
        throw std::runtime_error("attention_contribution: no visual sink pairs (empty sink mean)");
    }
    ContributionMeans means;
    means.sink_mean = sink_sum / static_cast<double>(sink_pairs);
    means.all_visual_mean = all_sum / static_cast<double>(all_pairs);
    means.sink_pairs = sink_pairs;
    means.all_visual_pairs = all_pairs;
    return means;
}

}  // namespace sinklab::intervene
