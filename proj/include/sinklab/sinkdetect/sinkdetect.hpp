#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "sinklab/tinylmm/layout.hpp"
#include "sinklab/tinylmm/trace.hpp"

namespace sinklab::sinkdetect {

// The fixed hidden-state dimensions where massive activation concentrates.
// Inherited from the base language model; toy models declare their own.
struct SinkDimensionSet {
    std::string model_id;
    std::set<int> dims;

    // dims must be non-empty, unique (by construction) and < model_dim.
    void validate(int model_dim) const;
};

// Per-layer sink picture for one forward pass.
struct SinkReport {
    double tau = 0.0;
    std::vector<std::vector<double>> phi;       // [L][N] sink dimension values
    std::vector<std::set<int>> sinks;           // [L] all sink token indices
    std::vector<std::set<int>> visual_sinks;    // [L] sinks restricted to I_vis

    int num_layers() const { return static_cast<int>(phi.size()); }
};

// phi(x) = max over sink dims of |x[d] / RMS(x)|. Scale-invariant. The RMS
// runs over all D dimensions, sink dims included, with no epsilon: an
// all-zero hidden state is an error rather than a silent zero.
double sink_dimension_value(std::span<const double> hidden, const SinkDimensionSet& dims);

// Classifies every token at every layer from the layer-input hidden states.
// j is a sink at layer l iff phi(x^{l-1}_j) >= tau.
SinkReport detect_sinks(const tinylmm::ForwardTrace& trace, const tinylmm::TokenLayout& layout,
                        const SinkDimensionSet& dims, double tau);

inline constexpr double kDefaultTau = 20.0;

// (layer, |visual sinks at that layer|) in layer order. Layers are 0-based.
std::vector<std::pair<int, int>> layerwise_sink_counts(const SinkReport& report);

struct ScatterRow {
    int token = 0;   // visual key j
    int layer = 0;
    int head = 0;
    int query = 0;   // text query i
    double phi = 0.0;
    double alpha = 0.0;
};

// Full (layer, head, text query, visual token) cross product of sink values
// against pre-intervention attention weights. CSV-writable.
std::vector<ScatterRow> scatter_export(const tinylmm::ForwardTrace& trace, const SinkReport& report,
                                       const tinylmm::TokenLayout& layout);

void write_scatter_csv(const std::vector<ScatterRow>& rows, const std::string& path);

}  // namespace sinklab::sinkdetect
