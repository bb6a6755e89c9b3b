#include "sinklab/sinkdetect/sinkdetect.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sinklab/matrix.hpp"

namespace sinklab::sinkdetect {

void SinkDimensionSet::validate(int model_dim) const {
    if (dims.empty()) throw std::invalid_argument("SinkDimensionSet: dims must be non-empty");
    for (int d : dims) {
        if (d < 0 || d >= model_dim) {
            throw std::invalid_argument("SinkDimensionSet: dim " + std::to_string(d) +
                                        " out of range for model_dim " + std::to_string(model_dim));
        }
    }
}

double sink_dimension_value(std::span<const double> hidden, const SinkDimensionSet& dims) {
    if (dims.dims.empty()) throw std::invalid_argument("sink_dimension_value: empty dim set");
    double ms = 0.0;
    for (double v : hidden) ms += v * v;
    if (ms == 0.0) {
        throw std::runtime_error("sink_dimension_value: all-zero hidden state (RMS is zero)");
    }
    const double rms = std::sqrt(ms / static_cast<double>(hidden.size()));
    double best = 0.0;
    for (int d : dims.dims) {
        if (d < 0 || static_cast<std::size_t>(d) >= hidden.size()) {
            throw std::invalid_argument("sink_dimension_value: dim out of range");
        }
        best = std::max(best, std::abs(hidden[static_cast<std::size_t>(d)] / rms));
    }
    return best;
}

SinkReport detect_sinks(const tinylmm::ForwardTrace& trace, const tinylmm::TokenLayout& layout,
                        const SinkDimensionSet& dims, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("detect_sinks: tau must be positive");
    if (layout.size() != trace.seq_len) {
        throw std::invalid_argument("detect_sinks: layout does not match trace");
    }
    SinkReport report;
    report.tau = tau;
    const auto layers = trace.layer_inputs.size();
    report.phi.resize(layers);
    report.sinks.resize(layers);
    report.visual_sinks.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& input = trace.layer_inputs[l];
        report.phi[l].resize(input.rows());
        for (std::size_t j = 0; j < input.rows(); ++j) {
            const double phi = sink_dimension_value(input.row(j), dims);
            report.phi[l][j] = phi;
            if (phi >= tau) {
                report.sinks[l].insert(static_cast<int>(j));
                if (layout.is_visual(static_cast<int>(j))) {
                    report.visual_sinks[l].insert(static_cast<int>(j));
                }
            }
        }
    }
    return report;
}

std::vector<std::pair<int, int>> layerwise_sink_counts(const SinkReport& report) {
    std::vector<std::pair<int, int>> counts;
    counts.reserve(report.visual_sinks.size());
    for (std::size_t l = 0; l < report.visual_sinks.size(); ++l) {
        counts.emplace_back(static_cast<int>(l), static_cast<int>(report.visual_sinks[l].size()));
    }
    return counts;
}

std::vector<ScatterRow> scatter_export(const tinylmm::ForwardTrace& trace, const SinkReport& report,
                                       const tinylmm::TokenLayout& layout) {
    if (report.num_layers() != trace.num_layers) {
        throw std::invalid_argument("scatter_export: report does not match trace");
    }
    std::vector<ScatterRow> rows;
    const auto& vis = layout.visual_indices();
    const auto& txt = layout.text_indices();
    rows.reserve(static_cast<std::size_t>(trace.num_layers) * static_cast<std::size_t>(trace.num_heads) *
                 vis.size() * txt.size());
    for (int l = 0; l < trace.num_layers; ++l) {
        for (int h = 0; h < trace.num_heads; ++h) {
            const Matrix& attn = trace.attn_pre[static_cast<std::size_t>(l)][static_cast<std::size_t>(h)];
            for (int i : txt) {
                for (int j : vis) {
                    rows.push_back({j, l, h, i, report.phi[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)],
                                    attn(static_cast<std::size_t>(i), static_cast<std::size_t>(j))});
                }
            }
        }
    }
    return rows;
}

void write_scatter_csv(const std::vector<ScatterRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_scatter_csv: cannot open " + path);
    out << "token,layer,head,query,phi,alpha\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.token << ',' << r.layer << ',' << r.head << ',' << r.query << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.phi);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.alpha);
        out << buf << '\n';
    }
}

}  // namespace sinklab::sinkdetect
