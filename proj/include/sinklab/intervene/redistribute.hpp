#pragma once

#include <set>
#include <span>
#include <vector>

#include "sinklab/intervene/var_params.hpp"
#include "sinklab/tinylmm/layout.hpp"

namespace sinklab::intervene {

struct RedistributeResult {
    std::vector<double> row;
    bool rewritten = false;
    // Budget was positive but every target entry carried zero weight; the
    // row is returned unchanged and the caller decides how to surface it.
    bool zero_target = false;
};

// Sum-preserving rewrite of one post-softmax attention row:
//   sinks scale by (1-p); the freed budget p * sum(sink weights) is added
//   to the target set proportionally to each target's existing weight.
// Sinks cover the full sink set (text sinks such as BOS included); the
// target set never overlaps it. When the budget is zero the row comes back
// bit-identical.
RedistributeResult redistribute_row(std::span<const double> row, const tinylmm::TokenLayout& layout,
                                    const std::set<int>& sinks, const std::set<int>& visual_sinks,
                                    double p, TargetMode mode);

}  // namespace sinklab::intervene
