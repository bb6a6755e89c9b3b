#include "sinklab/cli/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "sinklab/intervene/contribution.hpp"
#include "sinklab/intervene/heads.hpp"
#include "sinklab/intervene/knockout.hpp"
#include "sinklab/intervene/plan.hpp"
#include "sinklab/metrics/annotations.hpp"
#include "sinklab/metrics/background.hpp"
#include "sinklab/metrics/chair.hpp"
#include "sinklab/metrics/split.hpp"
#include "sinklab/rng.hpp"
#include "sinklab/sinkdetect/registry.hpp"
#include "sinklab/sinkdetect/sinkdetect.hpp"
#include "sinklab/tinylmm/dataset.hpp"
#include "sinklab/tinylmm/forward.hpp"
#include "sinklab/tinylmm/weights_io.hpp"

namespace sinklab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json resolved_params(const ExperimentConfig& cfg) {
    ordered_json params;
    params["mode"] = cfg.mode;
    params["target"] = cfg.target;
    params["tau"] = cfg.tau;
    params["rho"] = cfg.rho;
    params["p"] = cfg.p;
    params["gate"] = cfg.gate;
    params["head_selection"] = cfg.head_selection;
    params["exclude_last_layer"] = cfg.exclude_last_layer;
    params["excluded_layers"] = cfg.excluded_layers;
    params["ich_complement"] = cfg.ich_complement;
    params["seed"] = cfg.seed;
    params["max_new_tokens"] = cfg.max_new_tokens;
    params["random_trials"] = cfg.random_trials;
    params["metrics"] = cfg.metrics;
    return params;
}

intervene::VarParams var_params_from(const ExperimentConfig& cfg) {
    intervene::VarParams params;
    params.tau = cfg.tau;
    params.rho = cfg.rho;
    params.p = cfg.p;
    params.gate = cfg.gate;
    params.target_mode = intervene::target_mode_from_name(cfg.target);
    params.exclude_last_layer = cfg.exclude_last_layer;
    params.excluded_layers.insert(cfg.excluded_layers.begin(), cfg.excluded_layers.end());
    params.head_selection_enabled = cfg.head_selection;
    params.validate();
    return params;
}

struct LoadedExperiment {
    tinylmm::ModelBundle model;
    std::vector<tinylmm::SampleRecord> samples;
    sinkdetect::SinkDimensionSet dims;
};

LoadedExperiment load_model_and_data(const ExperimentConfig& cfg) {
    LoadedExperiment exp;
    exp.model = tinylmm::load_weights(cfg.model_path);
    exp.samples = tinylmm::load_dataset(cfg.dataset_path);
    auto registry = sinkdetect::SinkRegistry::builtin();
    if (!cfg.registry_path.empty()) registry.merge_file(cfg.registry_path);
    const std::string id = cfg.model_id.empty() ? exp.model.model_id : cfg.model_id;
    exp.dims = registry.lookup(id);
    exp.dims.validate(exp.model.config.model_dim);
    return exp;
}

// All numeric CSV output funnels through here so `run` and `report` emit
// identical bytes.
std::string number_to_string(const ordered_json& v) {
    return v.dump();
}

void emit_metrics_csv(const ordered_json& doc, const fs::path& dir) {
    std::ofstream out(dir / "metrics.csv");
    if (!out) throw std::runtime_error("cannot write metrics.csv");
    out << "metric,value\n";
    for (const auto& [key, value] : doc.at("aggregates").items()) {
        out << key << ',' << number_to_string(value) << '\n';
    }
}

void emit_scatter_csv(const ordered_json& doc, const fs::path& dir) {
    std::ofstream out(dir / "scatter.csv");
    if (!out) throw std::runtime_error("cannot write scatter.csv");
    out << "token,layer,head,query,phi,alpha\n";
    for (const auto& row : doc.at("scatter")) {
        out << row.at("token").get<int>() << ',' << row.at("layer").get<int>() << ','
            << row.at("head").get<int>() << ',' << row.at("query").get<int>() << ','
            << number_to_string(row.at("phi")) << ',' << number_to_string(row.at("alpha")) << '\n';
    }
}

void emit_layer_counts_csv(const ordered_json& doc, const fs::path& dir) {
    std::ofstream out(dir / "layer_counts.csv");
    if (!out) throw std::runtime_error("cannot write layer_counts.csv");
    out << "sample_id,layer,visual_sinks\n";
    for (const auto& row : doc.at("layer_counts")) {
        out << row.at("sample_id").get<std::string>() << ',' << row.at("layer").get<int>() << ','
            << row.at("count").get<int>() << '\n';
    }
}

void emit_summary_txt(const ordered_json& doc, const fs::path& dir) {
    std::ofstream out(dir / "summary.txt");
    if (!out) throw std::runtime_error("cannot write summary.txt");
    out << "sinklab run summary\n";
    out << "===================\n";
    out << "params:\n";
    for (const auto& [key, value] : doc.at("params").items()) {
        out << "  " << key << " = " << value.dump() << '\n';
    }
    out << "aggregates:\n";
    for (const auto& [key, value] : doc.at("aggregates").items()) {
        out << "  " << key << " = " << value.dump() << '\n';
    }
    out << "samples: " << doc.at("sample_results").size() << '\n';
}

void emit_artifacts(const ordered_json& doc, const fs::path& dir) {
    emit_metrics_csv(doc, dir);
    emit_scatter_csv(doc, dir);
    emit_layer_counts_csv(doc, dir);
    emit_summary_txt(doc, dir);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    const auto doc = nlohmann::json::parse(in);
    ExperimentConfig cfg;
    cfg.model_path = doc.value("model", cfg.model_path);
    cfg.dataset_path = doc.value("dataset", cfg.dataset_path);
    cfg.registry_path = doc.value("registry", cfg.registry_path);
    cfg.annotations_path = doc.value("annotations", cfg.annotations_path);
    cfg.captions_path = doc.value("captions", cfg.captions_path);
    cfg.predictions_path = doc.value("predictions", cfg.predictions_path);
    cfg.model_id = doc.value("model_id", cfg.model_id);
    cfg.mode = doc.value("mode", cfg.mode);
    cfg.target = doc.value("target", cfg.target);
    cfg.out_dir = doc.value("out", cfg.out_dir);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.tau = doc.value("tau", cfg.tau);
    cfg.rho = doc.value("rho", cfg.rho);
    cfg.p = doc.value("p", cfg.p);
    cfg.gate = doc.value("gate", cfg.gate);
    cfg.head_selection = doc.value("head_selection", cfg.head_selection);
    cfg.exclude_last_layer = doc.value("exclude_last_layer", cfg.exclude_last_layer);
    if (doc.contains("excluded_layers")) {
        cfg.excluded_layers = doc["excluded_layers"].get<std::vector<int>>();
    }
    cfg.ich_complement = doc.value("ich_complement", cfg.ich_complement);
    cfg.max_new_tokens = doc.value("max_new_tokens", cfg.max_new_tokens);
    cfg.random_trials = doc.value("random_trials", cfg.random_trials);
    cfg.scatter_sample = doc.value("scatter_sample", cfg.scatter_sample);
    cfg.pope_strategy = doc.value("pope_strategy", cfg.pope_strategy);
    cfg.pope_questions = doc.value("pope_questions", cfg.pope_questions);
    if (doc.contains("metrics")) cfg.metrics = doc["metrics"].get<std::vector<std::string>>();
    return cfg;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> modes = {"baseline", "var", "knockout", "random-knockout",
                                                "ich-ablate"};
    if (!modes.count(mode)) throw std::invalid_argument("config: unknown mode \"" + mode + "\"");
    intervene::target_mode_from_name(target);  // throws on junk
    if (max_new_tokens < 0) throw std::invalid_argument("config: max_new_tokens must be >= 0");
    if (random_trials < 1) throw std::invalid_argument("config: random_trials must be >= 1");
    for (const auto& metric : metrics) {
        if (metric != "accuracy" && metric != "chair" && metric != "pope") {
            throw std::invalid_argument("config: unknown metric \"" + metric + "\"");
        }
    }
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    ordered_json doc;
    doc["params"] = resolved_params(cfg);
    ordered_json aggregates;
    ordered_json sample_results = ordered_json::array();
    ordered_json scatter = ordered_json::array();
    ordered_json layer_counts = ordered_json::array();

    RunSummary summary;
    summary.mode = cfg.mode;

    const bool wants_accuracy =
        std::find(cfg.metrics.begin(), cfg.metrics.end(), "accuracy") != cfg.metrics.end();

    if (wants_accuracy) {
        auto exp = load_model_and_data(cfg);
        const intervene::InterventionPlan empty_plan;

        long long baseline_correct = 0;
        long long answered = 0;
        double intervened_correct = 0.0;  // fractional for averaged random trials

        for (std::size_t s = 0; s < exp.samples.size(); ++s) {
            const auto& rec = exp.samples[s];
            const auto layout = rec.layout();

            auto baseline = tinylmm::generate(exp.model, rec.ids, layout, empty_plan,
                                              cfg.max_new_tokens);
            const auto& prefill = baseline.step_traces.empty()
                                      ? tinylmm::forward(exp.model, rec.ids, layout, empty_plan)
                                      : baseline.step_traces.front();
            const auto report = sinkdetect::detect_sinks(prefill, layout, exp.dims, cfg.tau);

            for (const auto& [layer, count] : sinkdetect::layerwise_sink_counts(report)) {
                layer_counts.push_back(
                    {{"sample_id", rec.sample_id}, {"layer", layer}, {"count", count}});
            }
            if (static_cast<int>(s) == cfg.scatter_sample) {
                for (const auto& row : sinkdetect::scatter_export(prefill, report, layout)) {
                    scatter.push_back({{"token", row.token},
                                       {"layer", row.layer},
                                       {"head", row.head},
                                       {"query", row.query},
                                       {"phi", row.phi},
                                       {"alpha", row.alpha}});
                }
            }

            const bool has_answer = rec.answer.has_value();
            const int gold = has_answer ? *rec.answer : -1;
            const int base_out = baseline.generated_ids.empty() ? -1 : baseline.generated_ids[0];
            const bool base_ok = has_answer && base_out == gold;
            if (has_answer) {
                ++answered;
                if (base_ok) ++baseline_correct;
            }

            // Build and run the intervention for this sample.
            double sample_correct = 0.0;
            ordered_json outputs = ordered_json::array();
            long long sample_blocked = 0;
            if (cfg.mode == "baseline") {
                auto again = tinylmm::generate(exp.model, rec.ids, layout, empty_plan,
                                               cfg.max_new_tokens);
                const int out = again.generated_ids.empty() ? -1 : again.generated_ids[0];
                outputs.push_back(out);
                sample_correct = (has_answer && out == gold) ? 1.0 : 0.0;
            } else if (cfg.mode == "var") {
                intervene::InterventionPlan plan;
                plan.dims = exp.dims;
                plan.var = var_params_from(cfg);
                auto run = tinylmm::generate(exp.model, rec.ids, layout, plan, cfg.max_new_tokens);
                const int out = run.generated_ids.empty() ? -1 : run.generated_ids[0];
                outputs.push_back(out);
                sample_correct = (has_answer && out == gold) ? 1.0 : 0.0;
                for (const auto& trace : run.step_traces) {
                    for (const auto& row : trace.var_rows) {
                        if (row.rewritten) ++summary.rewritten_rows;
                        if (row.zero_target) ++summary.zero_target_rows;
                    }
                }
            } else if (cfg.mode == "knockout") {
                intervene::InterventionPlan plan;
                plan.overlay = intervene::knockout_mask(layout, report);
                sample_blocked = static_cast<long long>(plan.overlay.size());
                auto run = tinylmm::generate(exp.model, rec.ids, layout, plan, cfg.max_new_tokens);
                const int out = run.generated_ids.empty() ? -1 : run.generated_ids[0];
                outputs.push_back(out);
                sample_correct = (has_answer && out == gold) ? 1.0 : 0.0;
            } else if (cfg.mode == "random-knockout") {
                std::vector<int> counts;
                counts.reserve(report.visual_sinks.size());
                for (const auto& sinks : report.visual_sinks) {
                    counts.push_back(static_cast<int>(sinks.size()));
                }
                double trials_correct = 0.0;
                for (int trial = 0; trial < cfg.random_trials; ++trial) {
                    Rng stream = Rng::substream(cfg.seed, "random-knockout",
                                                s * 1000ull + static_cast<std::uint64_t>(trial));
                    intervene::InterventionPlan plan;
                    plan.overlay = intervene::random_knockout_mask(layout, counts, stream.next_u64());
                    sample_blocked += static_cast<long long>(plan.overlay.size());
                    auto run = tinylmm::generate(exp.model, rec.ids, layout, plan, cfg.max_new_tokens);
                    const int out = run.generated_ids.empty() ? -1 : run.generated_ids[0];
                    outputs.push_back(out);
                    if (has_answer && out == gold) trials_correct += 1.0;
                }
                sample_correct = trials_correct / static_cast<double>(cfg.random_trials);
            } else if (cfg.mode == "ich-ablate") {
                const auto selection =
                    intervene::select_image_centric(prefill, layout, report, var_params_from(cfg));
                intervene::InterventionPlan plan;
                plan.overlay = intervene::ich_ablation_mask(selection, layout, cfg.ich_complement);
                sample_blocked = static_cast<long long>(plan.overlay.size());
                auto run = tinylmm::generate(exp.model, rec.ids, layout, plan, cfg.max_new_tokens);
                const int out = run.generated_ids.empty() ? -1 : run.generated_ids[0];
                outputs.push_back(out);
                sample_correct = (has_answer && out == gold) ? 1.0 : 0.0;
            }
            if (has_answer) intervened_correct += sample_correct;
            summary.blocked_pairs += sample_blocked;

            sample_results.push_back({{"sample_id", rec.sample_id},
                                      {"baseline_output", base_out},
                                      {"outputs", outputs},
                                      {"answer", has_answer ? ordered_json(gold) : ordered_json(nullptr)},
                                      {"baseline_correct", base_ok},
                                      {"intervened_correct", sample_correct},
                                      {"blocked_pairs", sample_blocked}});
        }

        summary.samples = static_cast<int>(exp.samples.size());
        if (answered > 0) {
            summary.accuracy_baseline =
                static_cast<double>(baseline_correct) / static_cast<double>(answered);
            summary.accuracy_intervened = intervened_correct / static_cast<double>(answered);
            summary.accuracy_drop = summary.accuracy_baseline - summary.accuracy_intervened;
            aggregates["accuracy_baseline"] = summary.accuracy_baseline;
            aggregates["accuracy_intervened"] = summary.accuracy_intervened;
            aggregates["accuracy_drop"] = summary.accuracy_drop;
        }
        aggregates["blocked_pairs"] = summary.blocked_pairs;
        aggregates["var_rows_rewritten"] = summary.rewritten_rows;
        aggregates["var_rows_zero_target"] = summary.zero_target_rows;
    }

    for (const auto& metric : cfg.metrics) {
        if (metric == "chair") {
            if (cfg.annotations_path.empty() || cfg.captions_path.empty()) {
                throw std::invalid_argument("chair metric needs annotations and captions paths");
            }
            const auto annotations = metrics::load_annotations(cfg.annotations_path);
            std::map<std::string, std::set<std::string>> truth;
            for (const auto& a : annotations) truth[a.sample_id] = a.present_objects;
            const auto scores = metrics::chair_scores(metrics::load_captions(cfg.captions_path), truth);
            summary.chair_i = scores.chair_i;
            summary.chair_s = scores.chair_s;
            aggregates["chair_i"] = scores.chair_i;
            aggregates["chair_s"] = scores.chair_s;
        } else if (metric == "pope") {
            if (cfg.annotations_path.empty() || cfg.predictions_path.empty()) {
                throw std::invalid_argument("pope metric needs annotations and predictions paths");
            }
            const auto annotations = metrics::load_annotations(cfg.annotations_path);
            const auto queries =
                metrics::pope_build(annotations, metrics::pope_strategy_from_name(cfg.pope_strategy),
                                    cfg.pope_questions, cfg.seed);
            std::map<std::string, bool> predictions;
            {
                std::ifstream in(cfg.predictions_path);
                if (!in) throw std::runtime_error("cannot open " + cfg.predictions_path);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto j = nlohmann::json::parse(line);
                    predictions[j.at("query").get<std::string>()] = j.at("yes").get<bool>();
                }
            }
            summary.pope = metrics::pope_score(predictions, queries);
            summary.has_pope = true;
            metrics::write_pope_csv(queries, (dir / "pope_queries.csv").string());
            aggregates["pope_accuracy"] = summary.pope.accuracy;
            aggregates["pope_precision"] = summary.pope.precision;
            aggregates["pope_recall"] = summary.pope.recall;
            aggregates["pope_f1"] = summary.pope.f1;
        }
    }

    doc["aggregates"] = aggregates;
    doc["sample_results"] = sample_results;
    doc["layer_counts"] = layer_counts;
    doc["scatter"] = scatter;

    summary.report_path = (dir / "report.json").string();
    {
        std::ofstream out(summary.report_path);
        if (!out) throw std::runtime_error("cannot write report.json");
        out << doc.dump(2) << '\n';
    }
    emit_artifacts(doc, dir);
    return summary;
}

void regenerate_reports(const std::string& out_dir) {
    const fs::path dir(out_dir);
    const fs::path report = dir / "report.json";
    if (!fs::exists(report)) {
        throw std::runtime_error("regenerate_reports: no report.json under " + out_dir);
    }
    std::ifstream in(report);
    ordered_json doc = ordered_json::parse(in);
    emit_artifacts(doc, dir);
}

SweepSummary run_sweep(const ExperimentConfig& cfg, const SweepConfig& sweep) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    auto exp = load_model_and_data(cfg);
    std::vector<std::string> ids;
    ids.reserve(exp.samples.size());
    for (const auto& rec : exp.samples) ids.push_back(rec.sample_id);
    const auto split = metrics::pseudo_val_split(ids, sweep.fraction, cfg.seed);

    std::map<std::string, const tinylmm::SampleRecord*> by_id;
    for (const auto& rec : exp.samples) by_id[rec.sample_id] = &rec;

    const auto eval = [&](const metrics::SweepPoint& point,
                          const std::vector<std::string>& val_ids) -> double {
        long long correct = 0;
        long long total = 0;
        for (const auto& id : val_ids) {
            const auto* rec = by_id.at(id);
            if (!rec->answer) continue;
            intervene::InterventionPlan plan;
            plan.dims = exp.dims;
            ExperimentConfig point_cfg = cfg;
            point_cfg.tau = point.tau;
            point_cfg.rho = point.rho;
            point_cfg.p = point.p;
            plan.var = var_params_from(point_cfg);
            auto run = tinylmm::generate(exp.model, rec->ids, rec->layout(), plan, 1);
            ++total;
            if (!run.generated_ids.empty() && run.generated_ids[0] == *rec->answer) ++correct;
        }
        if (total == 0) throw std::runtime_error("sweep: no answerable samples in the split");
        return static_cast<double>(correct) / static_cast<double>(total);
    };

    const auto direction = sweep.direction == "minimize" ? metrics::SweepDirection::minimize
                                                         : metrics::SweepDirection::maximize;
    SweepSummary summary;
    summary.result = metrics::hp_sweep(sweep.tau_grid, sweep.rho_grid, sweep.p_grid, eval,
                                       split.validation, direction);
    summary.validation_samples = static_cast<int>(split.validation.size());

    metrics::write_sweep_csv(summary.result, (dir / "sweep.csv").string());
    ordered_json doc;
    doc["params"] = resolved_params(cfg);
    doc["fraction"] = sweep.fraction;
    doc["direction"] = sweep.direction;
    doc["validation_samples"] = summary.validation_samples;
    doc["best"] = {{"tau", summary.result.best.tau},
                   {"rho", summary.result.best.rho},
                   {"p", summary.result.best.p},
                   {"score", summary.result.best_score}};
    std::ofstream out(dir / "report.json");
    if (!out) throw std::runtime_error("cannot write sweep report.json");
    out << doc.dump(2) << '\n';
    return summary;
}

}  // namespace sinklab::cli
