#include "sinklab/metrics/split.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "sinklab/rng.hpp"

namespace sinklab::metrics {

Split pseudo_val_split(const std::vector<std::string>& sample_ids, double fraction,
                       std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0) {
        throw std::invalid_argument("pseudo_val_split: fraction must be in [0,1]");
    }
    const auto n = static_cast<int>(sample_ids.size());
    const int k = static_cast<int>(std::floor(fraction * static_cast<double>(n)));
    Rng rng = Rng::substream(seed, "split");
    const auto picks = rng.sample_without_replacement(n, k);
    std::set<int> chosen(picks.begin(), picks.end());
    Split split;
    for (int i = 0; i < n; ++i) {
        if (chosen.count(i)) {
            split.validation.push_back(sample_ids[static_cast<std::size_t>(i)]);
        } else {
            split.remainder.push_back(sample_ids[static_cast<std::size_t>(i)]);
        }
    }
    return split;
}

}  // namespace sinklab::metrics
