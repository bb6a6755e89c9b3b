#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sinklab::metrics {

struct Split {
    std::vector<std::string> validation;
    std::vector<std::string> remainder;
};

inline constexpr double kDefaultValFraction = 0.10;

// floor(fraction * n) ids drawn uniformly without replacement; both halves
// keep the input order. Deterministic per seed.
Split pseudo_val_split(const std::vector<std::string>& sample_ids, double fraction,
                       std::uint64_t seed);

}  // namespace sinklab::metrics
