#include "sinklab/sinkdetect/registry.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sinklab::sinkdetect {

SinkRegistry SinkRegistry::builtin() {
    SinkRegistry reg;
    reg.add("llava-1.5-7b", {1415, 2533});
    reg.add("llava-1.5-13b", {2100, 4743});
    reg.add("llava-1.5-hd-13b", {2100, 4743});
    reg.add("vila-13b", {2100, 4743});
    reg.add("qwen2-vl-7b", {458, 2570});
    reg.add("internvl2-8b", {3584});
    return reg;
}

void SinkRegistry::add(const std::string& model_id, std::set<int> dims) {
    if (dims.empty()) throw std::invalid_argument("SinkRegistry: empty dim set for " + model_id);
    table_[model_id] = std::move(dims);
}

void SinkRegistry::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("SinkRegistry: cannot open " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        std::set<int> dims;
        for (const auto& d : it.value()) dims.insert(d.get<int>());
        add(it.key(), std::move(dims));
    }
}

SinkDimensionSet SinkRegistry::lookup(const std::string& model_id) const {
    auto it = table_.find(model_id);
    if (it == table_.end()) {
        throw std::out_of_range("sink registry: no entry for model id \"" + model_id + "\"");
    }
    return SinkDimensionSet{model_id, it->second};
}

void SinkRegistry::write_file(const std::string& path) const {
    nlohmann::ordered_json doc;
    for (const auto& [id, dims] : table_) {
        doc[id] = std::vector<int>(dims.begin(), dims.end());
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("SinkRegistry: cannot write " + path);
    out << doc.dump(2) << '\n';
}

SinkDimensionSet registry_lookup(const std::string& model_id) {
    return SinkRegistry::builtin().lookup(model_id);
}

}  // namespace sinklab::sinkdetect
