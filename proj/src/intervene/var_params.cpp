#include "sinklab/intervene/var_params.hpp"

#include <stdexcept>

namespace sinklab::intervene {

std::string target_mode_name(TargetMode mode) {
    switch (mode) {
        case TargetMode::visual_nonsink: return "visual_nonsink";
        case TargetMode::text_nonsink: return "text_nonsink";
        case TargetMode::all_nonsink: return "all_nonsink";
    }
    throw std::logic_error("target_mode_name: bad mode");
}

TargetMode target_mode_from_name(const std::string& name) {
    if (name == "visual_nonsink" || name == "visual") return TargetMode::visual_nonsink;
    if (name == "text_nonsink" || name == "text") return TargetMode::text_nonsink;
    if (name == "all_nonsink" || name == "all") return TargetMode::all_nonsink;
    throw std::invalid_argument("unknown redistribution target: \"" + name + "\"");
}

void VarParams::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("VarParams: tau must be positive");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("VarParams: p must be in [0,1]");
    if (rho < 0.0) throw std::invalid_argument("VarParams: rho must be >= 0");
    if (!(gate > 0.0 && gate < 1.0)) throw std::invalid_argument("VarParams: gate must be in (0,1)");
    for (int l : excluded_layers) {
        if (l < 0) throw std::invalid_argument("VarParams: negative excluded layer");
    }
}

}  // namespace sinklab::intervene
