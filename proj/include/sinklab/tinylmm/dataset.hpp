#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sinklab/tinylmm/layout.hpp"

namespace sinklab::tinylmm {

// One prompt sample as stored in the JSON-lines dataset. `ids` and `roles`
// are required; fixture generators add the ground-truth fields.
struct SampleRecord {
    std::string sample_id;
    std::vector<int> ids;
    std::vector<std::string> roles;

    std::optional<int> answer;            // ground-truth next token
    std::optional<int> answer_position;   // sequence index of the answer token
    std::vector<int> sink_positions;      // sequence indices of baked sinks

    TokenLayout layout() const { return TokenLayout::from_names(roles); }
};

std::vector<SampleRecord> load_dataset(const std::string& path);
void save_dataset(const std::vector<SampleRecord>& samples, const std::string& path);

}  // namespace sinklab::tinylmm
