#include "sinklab/tinylmm/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sinklab::tinylmm {

using nlohmann::ordered_json;

std::vector<SampleRecord> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    std::vector<SampleRecord> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("load_dataset: " + path + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
        SampleRecord rec;
        rec.sample_id = doc.value("sample_id", "line" + std::to_string(line_no));
        rec.ids = doc.at("ids").get<std::vector<int>>();
        rec.roles = doc.at("roles").get<std::vector<std::string>>();
        if (rec.ids.size() != rec.roles.size()) {
            throw std::runtime_error("load_dataset: ids/roles length mismatch at line " +
                                     std::to_string(line_no));
        }
        if (doc.contains("answer") && !doc["answer"].is_null()) rec.answer = doc["answer"].get<int>();
        if (doc.contains("answer_position") && !doc["answer_position"].is_null()) {
            rec.answer_position = doc["answer_position"].get<int>();
        }
        if (doc.contains("sink_positions")) {
            rec.sink_positions = doc["sink_positions"].get<std::vector<int>>();
        }
        samples.push_back(std::move(rec));
    }
    return samples;
}

void save_dataset(const std::vector<SampleRecord>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot write " + path);
    for (const auto& rec : samples) {
        ordered_json doc;
        doc["sample_id"] = rec.sample_id;
        doc["ids"] = rec.ids;
        doc["roles"] = rec.roles;
        if (rec.answer) doc["answer"] = *rec.answer;
        if (rec.answer_position) doc["answer_position"] = *rec.answer_position;
        if (!rec.sink_positions.empty()) doc["sink_positions"] = rec.sink_positions;
        out << doc.dump() << '\n';
    }
}

}  // namespace sinklab::tinylmm
