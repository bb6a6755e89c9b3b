// Command-line driver: fixture synthesis, experiment runs, hyperparameter
// sweeps and report regeneration.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sinklab/cli/experiment.hpp"
#include "sinklab/fixture/fixture.hpp"

namespace {

void add_run_options(CLI::App* cmd, std::string& config_path, sinklab::cli::ExperimentConfig& cfg,
                     bool& no_head_selection) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its fields");
    cmd->add_option("--model", cfg.model_path, "weight file");
    cmd->add_option("--dataset", cfg.dataset_path, "JSONL dataset");
    cmd->add_option("--registry", cfg.registry_path, "sink-dimension registry JSON");
    cmd->add_option("--annotations", cfg.annotations_path, "annotations JSONL (chair/pope)");
    cmd->add_option("--captions", cfg.captions_path, "captions JSONL (chair)");
    cmd->add_option("--predictions", cfg.predictions_path, "predictions JSONL (pope)");
    cmd->add_option("--model-id", cfg.model_id, "override the weight file's model id");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--tau", cfg.tau, "sink threshold");
    cmd->add_option("--rho", cfg.rho, "head-selection ratio threshold");
    cmd->add_option("--p", cfg.p, "redistributed portion of sink attention");
    cmd->add_option("--gate", cfg.gate, "visual attention gate");
    cmd->add_option("--mode", cfg.mode, "baseline|var|knockout|random-knockout|ich-ablate");
    cmd->add_option("--target", cfg.target, "visual|text|all");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--max-new-tokens", cfg.max_new_tokens, "tokens to decode per sample");
    cmd->add_option("--trials", cfg.random_trials, "random-knockout repetitions");
    cmd->add_option("--scatter-sample", cfg.scatter_sample, "sample index exported to scatter.csv");
    cmd->add_option("--metrics", cfg.metrics, "metrics to compute (accuracy, chair, pope)");
    cmd->add_option("--pope-strategy", cfg.pope_strategy, "random|popular|adversarial");
    cmd->add_flag("--ich-complement", cfg.ich_complement, "ablate the unselected heads instead");
    cmd->add_flag("--no-head-selection", no_head_selection, "redistribute in every head");
}

sinklab::cli::ExperimentConfig merge_config(const std::string& config_path, CLI::App* cmd,
                                            const sinklab::cli::ExperimentConfig& flags,
                                            bool no_head_selection) {
    sinklab::cli::ExperimentConfig cfg =
        config_path.empty() ? sinklab::cli::ExperimentConfig{}
                            : sinklab::cli::ExperimentConfig::from_json_file(config_path);
    // Only fields the user actually passed override the file.
    auto set_if = [&](const char* name, auto member, auto value) {
        if (cmd->count(name) > 0) cfg.*member = value;
    };
    using EC = sinklab::cli::ExperimentConfig;
    set_if("--model", &EC::model_path, flags.model_path);
    set_if("--dataset", &EC::dataset_path, flags.dataset_path);
    set_if("--registry", &EC::registry_path, flags.registry_path);
    set_if("--annotations", &EC::annotations_path, flags.annotations_path);
    set_if("--captions", &EC::captions_path, flags.captions_path);
    set_if("--predictions", &EC::predictions_path, flags.predictions_path);
    set_if("--model-id", &EC::model_id, flags.model_id);
    set_if("--seed", &EC::seed, flags.seed);
    set_if("--tau", &EC::tau, flags.tau);
    set_if("--rho", &EC::rho, flags.rho);
    set_if("--p", &EC::p, flags.p);
    set_if("--gate", &EC::gate, flags.gate);
    set_if("--mode", &EC::mode, flags.mode);
    set_if("--target", &EC::target, flags.target);
    set_if("--out", &EC::out_dir, flags.out_dir);
    set_if("--max-new-tokens", &EC::max_new_tokens, flags.max_new_tokens);
    set_if("--trials", &EC::random_trials, flags.random_trials);
    set_if("--scatter-sample", &EC::scatter_sample, flags.scatter_sample);
    set_if("--metrics", &EC::metrics, flags.metrics);
    set_if("--pope-strategy", &EC::pope_strategy, flags.pope_strategy);
    if (cmd->count("--ich-complement") > 0) cfg.ich_complement = flags.ich_complement;
    if (no_head_selection) cfg.head_selection = false;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sinklab: visual attention sink laboratory"};
    app.require_subcommand(1);

    // fixture
    auto* fixture_cmd = app.add_subcommand("fixture", "synthesize a model + dataset fixture");
    sinklab::fixture::FixtureSpec spec;
    std::string fixture_out = "fixture";
    fixture_cmd->add_option("--preset", spec.preset, "standard|steal");
    fixture_cmd->add_option("--samples", spec.num_samples, "number of samples");
    fixture_cmd->add_option("--seed", spec.seed, "master seed");
    fixture_cmd->add_option("--model-dim", spec.model_dim, "hidden width");
    fixture_cmd->add_option("--sink-min", spec.sink_min, "min sinks per sample");
    fixture_cmd->add_option("--sink-max", spec.sink_max, "max sinks per sample");
    fixture_cmd->add_option("--model-id", spec.model_id, "registry id of the toy model");
    fixture_cmd->add_option("--out", fixture_out, "output directory");

    // run
    auto* run_cmd = app.add_subcommand("run", "execute an experiment");
    std::string run_config;
    sinklab::cli::ExperimentConfig run_flags;
    bool run_no_headsel = false;
    add_run_options(run_cmd, run_config, run_flags, run_no_headsel);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sweep over a validation split");
    std::string sweep_config;
    sinklab::cli::ExperimentConfig sweep_flags;
    bool sweep_no_headsel = false;
    sinklab::cli::SweepConfig sweep_spec;
    add_run_options(sweep_cmd, sweep_config, sweep_flags, sweep_no_headsel);
    sweep_cmd->add_option("--tau-grid", sweep_spec.tau_grid, "tau grid");
    sweep_cmd->add_option("--rho-grid", sweep_spec.rho_grid, "rho grid");
    sweep_cmd->add_option("--p-grid", sweep_spec.p_grid, "p grid");
    sweep_cmd->add_option("--fraction", sweep_spec.fraction, "validation fraction");
    sweep_cmd->add_option("--direction", sweep_spec.direction, "maximize|minimize");

    // report
    auto* report_cmd = app.add_subcommand("report", "regenerate artifacts from report.json");
    std::string report_dir;
    report_cmd->add_option("--out", report_dir, "run output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fixture_cmd->parsed()) {
            const auto bundle = sinklab::fixture::synth_fixture(spec);
            sinklab::fixture::write_fixture(bundle, fixture_out);
            std::printf("fixture written to %s (%d samples, theta=%g)\n", fixture_out.c_str(),
                        spec.num_samples, bundle.theta);
        } else if (run_cmd->parsed()) {
            const auto cfg = merge_config(run_config, run_cmd, run_flags, run_no_headsel);
            const auto summary = sinklab::cli::run_experiment(cfg);
            std::printf("run complete: mode=%s samples=%d", summary.mode.c_str(), summary.samples);
            if (summary.accuracy_baseline >= 0.0) {
                std::printf(" accuracy %.4f -> %.4f", summary.accuracy_baseline,
                            summary.accuracy_intervened);
            }
            std::printf("\nreport: %s\n", summary.report_path.c_str());
        } else if (sweep_cmd->parsed()) {
            const auto cfg = merge_config(sweep_config, sweep_cmd, sweep_flags, sweep_no_headsel);
            const auto summary = sinklab::cli::run_sweep(cfg, sweep_spec);
            std::printf("sweep complete: best tau=%g rho=%g p=%g score=%.6f (val=%d)\n",
                        summary.result.best.tau, summary.result.best.rho, summary.result.best.p,
                        summary.result.best_score, summary.validation_samples);
        } else if (report_cmd->parsed()) {
            sinklab::cli::regenerate_reports(report_dir);
            std::printf("artifacts regenerated under %s\n", report_dir.c_str());
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 1;
    }
    return 0;
}
