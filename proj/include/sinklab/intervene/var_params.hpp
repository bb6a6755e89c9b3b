#pragma once

#include <set>
#include <string>

namespace sinklab::intervene {

// Where the freed attention budget goes.
enum class TargetMode {
    visual_nonsink,  // default: visual tokens outside the sink set
    text_nonsink,
    all_nonsink,
};

std::string target_mode_name(TargetMode mode);
TargetMode target_mode_from_name(const std::string& name);

struct VarParams {
    double tau = 20.0;
    double rho = 0.8;  // 0.5 for hallucination runs, 0.9 for vision-centric
    double p = 0.6;
    double gate = 0.2;
    TargetMode target_mode = TargetMode::visual_nonsink;

    // Effective exclusions = excluded_layers plus the last layer when
    // exclude_last_layer is set (the default). Layers are 0-based.
    std::set<int> excluded_layers;
    bool exclude_last_layer = true;

    // When false, every head in every included layer is redistributed,
    // skipping the gate and ratio checks entirely.
    bool head_selection_enabled = true;

    // rho > 1 is allowed and selects nothing (r never exceeds 1).
    void validate() const;

    bool layer_excluded(int layer, int num_layers) const {
        if (exclude_last_layer && layer == num_layers - 1) return true;
        return excluded_layers.count(layer) > 0;
    }
};

}  // namespace sinklab::intervene
