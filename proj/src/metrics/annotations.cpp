#include "sinklab/metrics/annotations.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sinklab::metrics {

using nlohmann::ordered_json;

void GridAnnotation::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("GridAnnotation: grid dims must be >= 1");
    if (labels.size() != static_cast<std::size_t>(cells())) {
        throw std::invalid_argument("GridAnnotation: label count does not match grid size");
    }
}

void AnnotatedSample::validate() const {
    grid.validate();
    // Every non-background label must be a present object and vice versa.
    std::set<std::string> grid_objects;
    for (const auto& label : grid.labels) {
        if (label != grid.background_label) grid_objects.insert(label);
    }
    if (grid_objects != present_objects) {
        throw std::invalid_argument("AnnotatedSample " + sample_id +
                                    ": present_objects inconsistent with grid labels");
    }
}

std::string pope_strategy_name(PopeStrategy s) {
    switch (s) {
        case PopeStrategy::random: return "random";
        case PopeStrategy::popular: return "popular";
        case PopeStrategy::adversarial: return "adversarial";
    }
    throw std::logic_error("pope_strategy_name: bad strategy");
}

PopeStrategy pope_strategy_from_name(const std::string& name) {
    if (name == "random") return PopeStrategy::random;
    if (name == "popular") return PopeStrategy::popular;
    if (name == "adversarial") return PopeStrategy::adversarial;
    throw std::invalid_argument("unknown POPE strategy: \"" + name + "\"");
}

int ObjectStats::cooc(const std::string& a, const std::string& b) const {
    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = cooccurrence.find(key);
    return it == cooccurrence.end() ? 0 : it->second;
}

ObjectStats ObjectStats::from_corpus(const std::vector<AnnotatedSample>& corpus) {
    ObjectStats stats;
    for (const auto& sample : corpus) {
        for (const auto& obj : sample.present_objects) ++stats.frequency[obj];
        for (auto a = sample.present_objects.begin(); a != sample.present_objects.end(); ++a) {
            for (auto b = std::next(a); b != sample.present_objects.end(); ++b) {
                ++stats.cooccurrence[{*a, *b}];
            }
        }
    }
    return stats;
}

std::set<std::string> ObjectStats::all_objects() const {
    std::set<std::string> names;
    for (const auto& [name, _] : frequency) names.insert(name);
    return names;
}

std::vector<AnnotatedSample> load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_annotations: cannot open " + path);
    std::vector<AnnotatedSample> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto doc = nlohmann::json::parse(line);
        AnnotatedSample s;
        s.sample_id = doc.at("sample_id").get<std::string>();
        const auto& g = doc.at("grid");
        s.grid.width = g.at("width").get<int>();
        s.grid.height = g.at("height").get<int>();
        s.grid.background_label = g.value("background_label", std::string("background"));
        s.grid.labels = g.at("labels").get<std::vector<std::string>>();
        for (const auto& obj : doc.at("present_objects")) s.present_objects.insert(obj.get<std::string>());
        if (doc.contains("qa")) {
            for (const auto& q : doc["qa"]) {
                QaPair pair;
                pair.question_ids = q.at("question_ids").get<std::vector<int>>();
                pair.answer = q.at("answer").get<std::string>();
                s.qa.push_back(std::move(pair));
            }
        }
        s.validate();
        samples.push_back(std::move(s));
    }
    return samples;
}

void save_annotations(const std::vector<AnnotatedSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_annotations: cannot write " + path);
    for (const auto& s : samples) {
        ordered_json doc;
        doc["sample_id"] = s.sample_id;
        doc["grid"] = {{"width", s.grid.width},
                       {"height", s.grid.height},
                       {"background_label", s.grid.background_label},
                       {"labels", s.grid.labels}};
        doc["present_objects"] = std::vector<std::string>(s.present_objects.begin(), s.present_objects.end());
        ordered_json qa = ordered_json::array();
        for (const auto& pair : s.qa) {
            qa.push_back({{"question_ids", pair.question_ids}, {"answer", pair.answer}});
        }
        doc["qa"] = qa;
        out << doc.dump() << '\n';
    }
}

std::vector<CaptionRecord> load_captions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_captions: cannot open " + path);
    std::vector<CaptionRecord> captions;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto doc = nlohmann::json::parse(line);
        CaptionRecord rec;
        rec.sample_id = doc.at("sample_id").get<std::string>();
        rec.mentioned_objects = doc.at("mentioned_objects").get<std::vector<std::string>>();
        captions.push_back(std::move(rec));
    }
    return captions;
}

void save_captions(const std::vector<CaptionRecord>& captions, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_captions: cannot write " + path);
    for (const auto& rec : captions) {
        ordered_json doc;
        doc["sample_id"] = rec.sample_id;
        doc["mentioned_objects"] = rec.mentioned_objects;
        out << doc.dump() << '\n';
    }
}

}  // namespace sinklab::metrics
