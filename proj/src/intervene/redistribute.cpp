#include "sinklab/intervene/redistribute.hpp"

#include <stdexcept>

namespace sinklab::intervene {

using tinylmm::TokenLayout;
using tinylmm::TokenRole;

namespace {

bool in_target(int j, const TokenLayout& layout, const std::set<int>& sinks,
               const std::set<int>& visual_sinks, TargetMode mode) {
    if (sinks.count(j)) return false;
    switch (mode) {
        case TargetMode::visual_nonsink:
            return layout.is_visual(j) && !visual_sinks.count(j);
        case TargetMode::text_nonsink:
            return layout.is_text(j);
        case TargetMode::all_nonsink:
            return layout.is_visual(j) || layout.is_text(j);
    }
    return false;
}

}  // namespace

RedistributeResult redistribute_row(std::span<const double> row, const TokenLayout& layout,
                                    const std::set<int>& sinks, const std::set<int>& visual_sinks,
                                    double p, TargetMode mode) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("redistribute_row: p must be in [0,1]");
    if (static_cast<int>(row.size()) != layout.size()) {
        throw std::invalid_argument("redistribute_row: row does not match layout");
    }

    RedistributeResult result;
    result.row.assign(row.begin(), row.end());

    double sink_mass = 0.0;
    for (int j : sinks) sink_mass += row[static_cast<std::size_t>(j)];
    const double budget = p * sink_mass;
    if (budget == 0.0) return result;  // p = 0 or no sink weight: exact identity

    double target_mass = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (in_target(static_cast<int>(j), layout, sinks, visual_sinks, mode)) target_mass += row[j];
    }
    if (target_mass == 0.0) {
        result.zero_target = true;  // nowhere to put the budget; leave the row alone
        return result;
    }

    for (int j : sinks) result.row[static_cast<std::size_t>(j)] = (1.0 - p) * row[static_cast<std::size_t>(j)];
    const double scale = budget / target_mass;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (in_target(static_cast<int>(j), layout, sinks, visual_sinks, mode)) {
            result.row[j] = row[j] + scale * row[j];
        }
    }
    result.rewritten = true;
    return result;
}

}  // namespace sinklab::intervene
