#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sinklab/intervene/var_params.hpp"
#include "sinklab/sinkdetect/sinkdetect.hpp"
#include "sinklab/tinylmm/mask.hpp"

namespace sinklab::intervene {

// Adds magnitude * RMS(x_token) to each sink dimension of one token's
// hidden state at one layer input. layer_input is the 0-based index of the
// hidden-state slot x^layer_input (0 = the embeddings entering layer 1);
// the residual stream carries the value to every later layer.
struct PlantedActivation {
    int layer_input = 0;
    int token = 0;
    double magnitude = 50.0;
};

// Declarative description of everything done to one forward/generate call.
// Serializes to JSON so experiments replay from config files.
struct InterventionPlan {
    tinylmm::CausalMaskOverlay overlay;
    std::optional<VarParams> var;
    std::vector<PlantedActivation> plants;
    // Sink dimensions used by VAR detection and by plants. Must be set when
    // either is present.
    std::optional<sinkdetect::SinkDimensionSet> dims;
    std::uint64_t rng_seed = 0;

    bool empty() const { return overlay.empty() && !var && plants.empty(); }

    std::string to_json() const;
    static InterventionPlan from_json(const std::string& text);
    void save(const std::string& path) const;
    static InterventionPlan load(const std::string& path);
};

}  // namespace sinklab::intervene
