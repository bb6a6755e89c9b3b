#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sinklab/metrics/pope.hpp"
#include "sinklab/metrics/sweep.hpp"

namespace sinklab::cli {

// Everything one `run` needs. Loadable from a JSON config file; CLI flags
// override individual fields afterwards.
struct ExperimentConfig {
    std::string model_path;
    std::string dataset_path;
    std::string registry_path;      // optional; merged over the built-in table
    std::string annotations_path;   // required by chair/pope metrics
    std::string captions_path;      // chair
    std::string predictions_path;   // pope: JSONL {"query": key, "yes": bool}
    std::string model_id;           // optional override of the weight file id

    std::string mode = "baseline";  // baseline|var|knockout|random-knockout|ich-ablate
    std::string target = "visual";  // visual|text|all
    std::string out_dir = "out";
    std::uint64_t seed = 1;

    double tau = 20.0;
    double rho = 0.8;
    double p = 0.6;
    double gate = 0.2;
    bool head_selection = true;
    bool exclude_last_layer = true;
    std::vector<int> excluded_layers;
    bool ich_complement = false;

    int max_new_tokens = 1;
    int random_trials = 5;          // random-knockout repetitions per sample
    int scatter_sample = 0;         // sample whose scatter rows go to scatter.csv
    std::string pope_strategy = "random";
    int pope_questions = metrics::kPopeQuestionsPerImage;

    std::vector<std::string> metrics = {"accuracy"};

    static ExperimentConfig from_json_file(const std::string& path);
    void validate() const;
};

struct RunSummary {
    std::string mode;
    int samples = 0;
    double accuracy_baseline = -1.0;
    double accuracy_intervened = -1.0;
    double accuracy_drop = 0.0;
    long long blocked_pairs = 0;
    long long rewritten_rows = 0;
    long long zero_target_rows = 0;
    double chair_i = -1.0;
    double chair_s = -1.0;
    bool has_pope = false;
    metrics::PopeScores pope;
    std::string report_path;
};

// Executes the configured experiment and writes report.json, metrics.csv,
// scatter.csv, layer_counts.csv and summary.txt under out_dir.
RunSummary run_experiment(const ExperimentConfig& config);

// Rebuilds summary.txt and the CSV artifacts from an existing report.json.
// Byte-identical on repeated invocations.
void regenerate_reports(const std::string& out_dir);

struct SweepConfig {
    std::vector<double> tau_grid = {20.0};
    std::vector<double> rho_grid = {0.0, 0.5, 0.8, 0.9};
    std::vector<double> p_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    double fraction = 0.10;
    std::string direction = "maximize";
};

struct SweepSummary {
    metrics::SweepResult result;
    int validation_samples = 0;
};

// Hyperparameter sweep of VAR accuracy over a pseudo-validation split of the
// dataset. Writes sweep.csv and report.json under out_dir.
SweepSummary run_sweep(const ExperimentConfig& config, const SweepConfig& sweep);

}  // namespace sinklab::cli
