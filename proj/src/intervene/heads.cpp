#include "sinklab/intervene/heads.hpp"

#include <stdexcept>

namespace sinklab::intervene {

using tinylmm::CausalMaskOverlay;
using tinylmm::TokenLayout;

double visual_attention_sum(std::span<const double> row, const TokenLayout& layout) {
    double s = 0.0;
    for (int j : layout.visual_indices()) s += row[static_cast<std::size_t>(j)];
    return s;
}

double visual_nonsink_ratio(std::span<const double> row, const TokenLayout& layout,
                            const std::set<int>& visual_sinks) {
    double total = 0.0;
    double nonsink = 0.0;
    for (int j : layout.visual_indices()) {
        const double a = row[static_cast<std::size_t>(j)];
        total += a;
        if (!visual_sinks.count(j)) nonsink += a;
    }
    if (total == 0.0) return 0.0;
    return nonsink / total;
}

bool head_query_selected(double visual_sum, double ratio, const VarParams& params) {
    return visual_sum >= params.gate && ratio >= params.rho;
}

HeadSelection select_image_centric(const tinylmm::ForwardTrace& trace, const TokenLayout& layout,
                                   const sinkdetect::SinkReport& report, const VarParams& params) {
    params.validate();
    if (report.num_layers() != trace.num_layers) {
        throw std::invalid_argument("select_image_centric: report does not match trace");
    }
    if (layout.size() != trace.seq_len) {
        throw std::invalid_argument("select_image_centric: layout does not match trace");
    }
    HeadSelection sel;
    sel.num_layers = trace.num_layers;
    sel.num_heads = trace.num_heads;
    for (int l = 0; l < trace.num_layers; ++l) {
        const bool excluded = params.layer_excluded(l, trace.num_layers);
        const auto& visual_sinks = report.visual_sinks[static_cast<std::size_t>(l)];
        for (int h = 0; h < trace.num_heads; ++h) {
            const Matrix& attn = trace.attn_pre[static_cast<std::size_t>(l)][static_cast<std::size_t>(h)];
            for (int i : layout.text_indices()) {
                auto row = attn.row(static_cast<std::size_t>(i));
                HeadSelection::Entry e;
                e.layer = l;
                e.head = h;
                e.query = i;
                e.visual_sum = visual_attention_sum(row, layout);
                e.ratio = visual_nonsink_ratio(row, layout, visual_sinks);
                e.selected = !excluded && head_query_selected(e.visual_sum, e.ratio, params);
                sel.entries.push_back(e);
            }
        }
    }
    return sel;
}

CausalMaskOverlay ich_ablation_mask(const HeadSelection& selection, const TokenLayout& layout,
                                    bool complement) {
    // Reduce the per-query selection to head level: a head is image-centric
    // if it was selected for at least one text query.
    std::set<std::pair<int, int>> selected_heads;
    for (const auto& e : selection.entries) {
        if (e.selected) selected_heads.insert({e.layer, e.head});
    }
    CausalMaskOverlay overlay;
    for (int l = 0; l < selection.num_layers; ++l) {
        for (int h = 0; h < selection.num_heads; ++h) {
            const bool is_selected = selected_heads.count({l, h}) > 0;
            if (is_selected == complement) continue;
            for (int i : layout.text_indices()) {
                for (int j : layout.visual_indices()) {
                    overlay.block(l, h, i, j);
                }
            }
        }
    }
    return overlay;
}

std::map<int, int> count_image_centric_heads(const HeadSelection& selection) {
    std::map<int, int> counts;
    std::set<int> queries;
    for (const auto& e : selection.entries) queries.insert(e.query);
    for (int q : queries) counts[q] = 0;
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& e : selection.entries) {
        if (e.selected && seen.insert({e.layer, e.head, e.query}).second) {
            ++counts[e.query];
        }
    }
    return counts;
}

}  // namespace sinklab::intervene
