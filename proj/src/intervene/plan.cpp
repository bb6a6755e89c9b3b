#include "sinklab/intervene/plan.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sinklab::intervene {

using nlohmann::ordered_json;

std::string InterventionPlan::to_json() const {
    ordered_json doc;
    doc["rng_seed"] = rng_seed;
    ordered_json blocks = ordered_json::array();
    for (const auto& e : overlay.entries()) {
        blocks.push_back({{"layer", e.layer}, {"head", e.head}, {"query", e.query}, {"key", e.key}});
    }
    doc["overlay"] = blocks;
    ordered_json plant_list = ordered_json::array();
    for (const auto& p : plants) {
        plant_list.push_back({{"layer_input", p.layer_input}, {"token", p.token}, {"magnitude", p.magnitude}});
    }
    doc["plants"] = plant_list;
    if (dims) {
        doc["dims"] = {{"model_id", dims->model_id},
                       {"dims", std::vector<int>(dims->dims.begin(), dims->dims.end())}};
    } else {
        doc["dims"] = nullptr;
    }
    if (var) {
        doc["var"] = {{"tau", var->tau},
                      {"rho", var->rho},
                      {"p", var->p},
                      {"gate", var->gate},
                      {"target_mode", target_mode_name(var->target_mode)},
                      {"excluded_layers", std::vector<int>(var->excluded_layers.begin(), var->excluded_layers.end())},
                      {"exclude_last_layer", var->exclude_last_layer},
                      {"head_selection_enabled", var->head_selection_enabled}};
    } else {
        doc["var"] = nullptr;
    }
    return doc.dump(2);
}

InterventionPlan InterventionPlan::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    InterventionPlan plan;
    plan.rng_seed = doc.value("rng_seed", 0ull);
    if (doc.contains("overlay")) {
        for (const auto& e : doc["overlay"]) {
            plan.overlay.block(e.at("layer").get<int>(), e.at("head").get<int>(),
                               e.at("query").get<int>(), e.at("key").get<int>());
        }
    }
    if (doc.contains("plants")) {
        for (const auto& p : doc["plants"]) {
            plan.plants.push_back({p.at("layer_input").get<int>(), p.at("token").get<int>(),
                                   p.at("magnitude").get<double>()});
        }
    }
    if (doc.contains("dims") && !doc["dims"].is_null()) {
        sinkdetect::SinkDimensionSet dims;
        dims.model_id = doc["dims"].value("model_id", std::string{});
        for (const auto& d : doc["dims"].at("dims")) dims.dims.insert(d.get<int>());
        plan.dims = std::move(dims);
    }
    if (doc.contains("var") && !doc["var"].is_null()) {
        const auto& v = doc["var"];
        VarParams params;
        params.tau = v.value("tau", 20.0);
        params.rho = v.value("rho", 0.8);
        params.p = v.value("p", 0.6);
        params.gate = v.value("gate", 0.2);
        params.target_mode = target_mode_from_name(v.value("target_mode", std::string("visual_nonsink")));
        if (v.contains("excluded_layers")) {
            for (const auto& l : v["excluded_layers"]) params.excluded_layers.insert(l.get<int>());
        }
        params.exclude_last_layer = v.value("exclude_last_layer", true);
        params.head_selection_enabled = v.value("head_selection_enabled", true);
        params.validate();
        plan.var = params;
    }
    return plan;
}

void InterventionPlan::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("InterventionPlan: cannot write " + path);
    out << to_json() << '\n';
}

InterventionPlan InterventionPlan::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("InterventionPlan: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

}  // namespace sinklab::intervene
