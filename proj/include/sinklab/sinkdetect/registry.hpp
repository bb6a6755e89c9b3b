#pragma once

#include <map>
#include <string>

#include "sinklab/sinkdetect/sinkdetect.hpp"

namespace sinklab::sinkdetect {

// Registry of sink dimensions per model id. Ships with the published sets
// for the supported base models; toy models register their own entries,
// typically via a JSON file written next to their weights.
class SinkRegistry {
public:
    // Registry preloaded with the published entries.
    static SinkRegistry builtin();

    // JSON map model_id -> [dims...]; merged over the current contents.
    void merge_file(const std::string& path);
    void add(const std::string& model_id, std::set<int> dims);

    bool contains(const std::string& model_id) const { return table_.count(model_id) > 0; }

    // Throws std::out_of_range with the id for unknown models.
    SinkDimensionSet lookup(const std::string& model_id) const;

    void write_file(const std::string& path) const;

    const std::map<std::string, std::set<int>>& table() const { return table_; }

private:
    std::map<std::string, std::set<int>> table_;
};

// Convenience over SinkRegistry::builtin().
SinkDimensionSet registry_lookup(const std::string& model_id);

}  // namespace sinklab::sinkdetect
