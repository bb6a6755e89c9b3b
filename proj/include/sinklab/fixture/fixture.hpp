#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "sinklab/metrics/annotations.hpp"
#include "sinklab/sinkdetect/sinkdetect.hpp"
#include "sinklab/tinylmm/dataset.hpp"
#include "sinklab/tinylmm/model.hpp"

namespace sinklab::fixture {

// Construction recipe for a synthetic corpus: a hand-built two-layer decoder
// whose first layer copies the class of one answer-carrying visual token
// into the query's residual stream, plus per-sample prompts that place that
// answer among filler and baked sink tokens on a labelled grid.
//
// Presets:
//   "standard" - sinks draw modest attention; the baseline answers correctly.
//                Used for the knockout and contribution experiments.
//   "steal"    - sinks draw most of the query's attention mass; the baseline
//                misses the answer until the budget is redistributed.
struct FixtureSpec {
    std::string preset = "standard";
    int num_samples = 200;
    std::uint64_t seed = 1;

    int grid_width = 4;
    int grid_height = 3;
    int text_prefix = 2;  // plain text tokens before the query token
    int num_classes = 6;

    int num_layers = 2;
    int num_heads = 2;
    int model_dim = 640;
    int mlp_dim = 8;

    int sink_min = 1;
    int sink_max = 3;
    double sink_value = 5.0;    // massive activation written on the sink dim
    double visual_score = 2.0;  // query -> visual attention logit
    // query -> sink attention logit; <0 picks the preset default
    double sink_score = -1.0;

    std::set<int> sink_dims = {137, 421};
    std::string model_id;  // default: "toy-<preset>"

    int num_visual() const { return grid_width * grid_height; }
    int seq_len() const { return 1 + num_visual() + text_prefix + 1; }
    double resolved_sink_score() const;
    std::string resolved_model_id() const;
    void validate() const;
};

// Fixed vocabulary of the fixture models.
struct FixtureVocab {
    static constexpr int kBos = 0;
    static constexpr int kDunno = 1;  // emitted when the visual evidence is too weak
    static constexpr int kFirstAnswer = 2;
    int num_classes;
    int filler() const { return kFirstAnswer + num_classes; }
    int sink() const { return filler() + 1; }
    int text() const { return sink() + 1; }
    int query() const { return text() + 1; }
    int vocab_size() const { return query() + 1; }
};

struct FixtureBundle {
    FixtureSpec spec;
    tinylmm::ModelBundle model;
    sinkdetect::SinkDimensionSet dims;
    std::vector<tinylmm::SampleRecord> samples;
    std::vector<metrics::AnnotatedSample> annotations;

    // Calibration record: answer-token attention mass seen by the query at
    // layer 0, per sink count, without and with redistribution.
    std::vector<double> baseline_alpha;
    std::vector<double> var_alpha;
    double theta = 0.0;  // decision weight baked into the unembedding
};

// Deterministic in every byte for a fixed spec.
FixtureBundle synth_fixture(const FixtureSpec& spec);

// Writes model.weights, dataset.jsonl, annotations.jsonl, registry.json and
// fixture.json under out_dir.
void write_fixture(const FixtureBundle& bundle, const std::string& out_dir);

std::string object_name(int answer_class);

}  // namespace sinklab::fixture
