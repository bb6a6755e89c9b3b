#include "sinklab/fixture/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sinklab/intervene/plan.hpp"
#include "sinklab/rng.hpp"
#include "sinklab/sinkdetect/registry.hpp"
#include "sinklab/tinylmm/forward.hpp"
#include "sinklab/tinylmm/weights_io.hpp"

namespace sinklab::fixture {

namespace {
constexpr double kBaselineMarginScale = 0.5;   // standard: theta sits below every baseline alpha
constexpr double kMinStealGap = 1.15;          // steal: VAR alpha must clear baseline by 15%
}  // namespace

double FixtureSpec::resolved_sink_score() const {
    if (sink_score >= 0.0) return sink_score;
    // Steal preset parks roughly 0.4-0.7 of the query mass on the sinks;
    // standard keeps them at about twice a filler's share.
    return preset == "steal" ? 4.07 : visual_score + std::log(2.0);
}

std::string FixtureSpec::resolved_model_id() const {
    return model_id.empty() ? "toy-" + preset : model_id;
}

void FixtureSpec::validate() const {
    if (preset != "standard" && preset != "steal") {
        throw std::invalid_argument("FixtureSpec: preset must be standard or steal");
    }
    if (num_samples < 1) throw std::invalid_argument("FixtureSpec: num_samples must be >= 1");
    if (grid_width < 1 || grid_height < 1) throw std::invalid_argument("FixtureSpec: bad grid");
    if (num_classes < 1) throw std::invalid_argument("FixtureSpec: need at least one class");
    if (text_prefix < 0) throw std::invalid_argument("FixtureSpec: negative text prefix");
    if (num_layers < 2) throw std::invalid_argument("FixtureSpec: need >= 2 layers (last is excluded)");
    if (num_heads < 1) throw std::invalid_argument("FixtureSpec: need >= 1 head");
    if (model_dim % num_heads != 0) throw std::invalid_argument("FixtureSpec: model_dim % num_heads != 0");
    if (sink_min < 0 || sink_max < sink_min) throw std::invalid_argument("FixtureSpec: bad sink range");
    if (sink_max > num_visual() - 1) {
        throw std::invalid_argument("FixtureSpec: sink_max leaves no room for the answer token");
    }
    if (sink_dims.empty()) throw std::invalid_argument("FixtureSpec: sink_dims empty");
    for (int d : sink_dims) {
        if (d < 0 || d >= model_dim) throw std::invalid_argument("FixtureSpec: sink dim out of range");
    }
    // phi of a baked sink must clear the tau=20 line with margin; phi is
    // bounded by sqrt(model_dim), so small dims cannot host a sink.
    const double energy = sink_value * sink_value + 2.0;
    const double phi = sink_value * std::sqrt(static_cast<double>(model_dim) / energy);
    if (phi < 22.0) {
        throw std::invalid_argument("FixtureSpec: sink phi would be " + std::to_string(phi) +
                                    "; raise model_dim or sink_value");
    }
    const int reserved = num_classes + 5;
    for (int d : sink_dims) {
        if (d < reserved) throw std::invalid_argument("FixtureSpec: sink dims collide with semantic dims");
    }
    if (model_dim / num_heads < num_classes + 2) {
        throw std::invalid_argument("FixtureSpec: head_dim too small for the class channels");
    }
}

std::string object_name(int answer_class) { return "object_" + std::to_string(answer_class); }

namespace {

struct Dims {
    int cls0 = 0;      // class channels occupy [cls0, cls0+K)
    int visual_marker; // set in ctor
    int text_marker;
    int query_marker;
    int self_marker;
    int ballast;

    explicit Dims(int num_classes)
        : visual_marker(num_classes),
          text_marker(num_classes + 1),
          query_marker(num_classes + 2),
          self_marker(num_classes + 3),
          ballast(num_classes + 4) {}
};

// Every embedding is padded to the same total energy so the RMS norm maps
// markers of different token kinds to the same amplitude.
void finish_embedding(Matrix& emb, int token, int ballast_dim, double target_energy) {
    double energy = 0.0;
    for (std::size_t d = 0; d < emb.cols(); ++d) {
        const double v = emb(static_cast<std::size_t>(token), d);
        energy += v * v;
    }
    if (energy > target_energy) throw std::logic_error("fixture embedding exceeds energy budget");
    emb(static_cast<std::size_t>(token), static_cast<std::size_t>(ballast_dim)) =
        std::sqrt(target_energy - energy);
}

// Round-trips every weight through float32 so that in-memory calibration
// matches what a reloaded weight file computes.
void quantize_model(tinylmm::ModelBundle& model) {
    auto q = [](Matrix& m) {
        for (double& v : m.data()) v = static_cast<double>(static_cast<float>(v));
    };
    auto qv = [](std::vector<double>& v) {
        for (double& x : v) x = static_cast<double>(static_cast<float>(x));
    };
    q(model.token_embedding);
    for (auto& layer : model.layers) {
        qv(layer.attn_norm_scale);
        qv(layer.mlp_norm_scale);
        for (auto& head : layer.heads) {
            q(head.wq);
            q(head.wk);
            q(head.wv);
            q(head.wo);
        }
        q(layer.mlp_up);
        q(layer.mlp_down);
    }
    qv(model.final_norm_scale);
    q(model.unembedding);
}

tinylmm::ModelBundle build_model(const FixtureSpec& spec, const FixtureVocab& vocab,
                                 const Dims& dims) {
    tinylmm::ModelConfig cfg;
    cfg.num_layers = spec.num_layers;
    cfg.num_heads = spec.num_heads;
    cfg.model_dim = spec.model_dim;
    cfg.head_dim = spec.model_dim / spec.num_heads;
    cfg.mlp_dim = spec.mlp_dim;
    cfg.vocab_size = vocab.vocab_size();
    cfg.max_seq_len = spec.seq_len() + 8;
    cfg.norm_epsilon = 1e-6;

    auto model = tinylmm::ModelBundle::zeros(cfg, spec.resolved_model_id());
    const double energy = spec.sink_value * spec.sink_value + 2.0;
    const int first_sink_dim = *spec.sink_dims.begin();

    auto& emb = model.token_embedding;
    emb(FixtureVocab::kBos, static_cast<std::size_t>(first_sink_dim)) = spec.sink_value;
    for (int c = 0; c < spec.num_classes; ++c) {
        const auto tok = static_cast<std::size_t>(FixtureVocab::kFirstAnswer + c);
        emb(tok, static_cast<std::size_t>(dims.cls0 + c)) = 1.0;
        emb(tok, static_cast<std::size_t>(dims.visual_marker)) = 1.0;
    }
    emb(static_cast<std::size_t>(vocab.filler()), static_cast<std::size_t>(dims.visual_marker)) = 1.0;
    emb(static_cast<std::size_t>(vocab.sink()), static_cast<std::size_t>(dims.visual_marker)) = 1.0;
    emb(static_cast<std::size_t>(vocab.sink()), static_cast<std::size_t>(first_sink_dim)) = spec.sink_value;
    emb(static_cast<std::size_t>(vocab.text()), static_cast<std::size_t>(dims.text_marker)) = 1.0;
    emb(static_cast<std::size_t>(vocab.query()), static_cast<std::size_t>(dims.query_marker)) = 1.0;
    emb(static_cast<std::size_t>(vocab.query()), static_cast<std::size_t>(dims.self_marker)) = 1.0;
    for (int t = 0; t < vocab.vocab_size(); ++t) {
        finish_embedding(emb, t, dims.ballast, energy);
    }

    // Layer 0, head 0 carries all the behavior: the query matches visual
    // keys (sinks more strongly), values expose the class channels, and the
    // output projection writes them back to the residual stream. Head 1 and
    // layer 1 stay inert.
    const double norm_amp = std::sqrt(energy / static_cast<double>(spec.model_dim));  // = RMS of any embedding
    const double head_scale = std::sqrt(static_cast<double>(cfg.head_dim));
    auto& head = model.layers[0].heads[0];
    const double w_match = norm_amp * std::sqrt(spec.visual_score * head_scale);
    head.wq(static_cast<std::size_t>(dims.query_marker), 0) = w_match;
    head.wk(static_cast<std::size_t>(dims.visual_marker), 0) = w_match;
    // Extra key energy for sink tokens, read off the massive activation.
    const double sink_boost =
        w_match * (spec.resolved_sink_score() / spec.visual_score - 1.0) / spec.sink_value;
    head.wk(static_cast<std::size_t>(first_sink_dim), 0) = sink_boost;
    for (int c = 0; c < spec.num_classes; ++c) {
        head.wv(static_cast<std::size_t>(dims.cls0 + c), static_cast<std::size_t>(2 + c)) = norm_amp;
        head.wo(static_cast<std::size_t>(2 + c), static_cast<std::size_t>(dims.cls0 + c)) = 1.0;
    }

    // Readout: answer classes come from their channels; the fallback token
    // reads the query's own marker, with the decision weight calibrated
    // after the corpus is built.
    for (int c = 0; c < spec.num_classes; ++c) {
        model.unembedding(static_cast<std::size_t>(dims.cls0 + c),
                          static_cast<std::size_t>(FixtureVocab::kFirstAnswer + c)) = 1.0;
    }
    model.unembedding(static_cast<std::size_t>(dims.self_marker), FixtureVocab::kDunno) = 1.0;
    return model;
}

tinylmm::SampleRecord make_sample(const FixtureSpec& spec, const FixtureVocab& vocab, int index,
                                  int answer_class, int answer_pos, const std::vector<int>& sink_pos) {
    tinylmm::SampleRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "s%04d", index);
    rec.sample_id = id;
    rec.ids.push_back(FixtureVocab::kBos);
    rec.roles.emplace_back("bos");
    const std::set<int> sink_set(sink_pos.begin(), sink_pos.end());
    for (int v = 1; v <= spec.num_visual(); ++v) {
        int id_v = vocab.filler();
        if (v == answer_pos) id_v = FixtureVocab::kFirstAnswer + answer_class;
        if (sink_set.count(v)) id_v = vocab.sink();
        rec.ids.push_back(id_v);
        rec.roles.emplace_back("visual");
    }
    for (int t = 0; t < spec.text_prefix; ++t) {
        rec.ids.push_back(vocab.text());
        rec.roles.emplace_back("text");
    }
    rec.ids.push_back(vocab.query());
    rec.roles.emplace_back("text");
    rec.answer = FixtureVocab::kFirstAnswer + answer_class;
    rec.answer_position = answer_pos;
    rec.sink_positions = sink_pos;
    return rec;
}

metrics::AnnotatedSample annotate(const FixtureSpec& spec, const tinylmm::SampleRecord& rec,
                                  int answer_class, int answer_pos) {
    metrics::AnnotatedSample ann;
    ann.sample_id = rec.sample_id;
    ann.grid.width = spec.grid_width;
    ann.grid.height = spec.grid_height;
    ann.grid.labels.assign(static_cast<std::size_t>(spec.num_visual()), ann.grid.background_label);
    ann.grid.labels[static_cast<std::size_t>(answer_pos - 1)] = object_name(answer_class);
    ann.present_objects.insert(object_name(answer_class));
    metrics::QaPair qa;
    qa.question_ids = {rec.ids.back()};
    qa.answer = object_name(answer_class);
    ann.qa.push_back(std::move(qa));
    return ann;
}

}  // namespace

FixtureBundle synth_fixture(const FixtureSpec& spec) {
    spec.validate();
    const FixtureVocab vocab{spec.num_classes};
    const Dims dims(spec.num_classes);

    FixtureBundle bundle;
    bundle.spec = spec;
    bundle.model = build_model(spec, vocab, dims);
    quantize_model(bundle.model);
    bundle.dims = sinkdetect::SinkDimensionSet{spec.resolved_model_id(), spec.sink_dims};

    Rng rng = Rng::substream(spec.seed, "fixture");
    for (int s = 0; s < spec.num_samples; ++s) {
        const int answer_class = rng.uniform_int(0, spec.num_classes - 1);
        const int n_sinks = rng.uniform_int(spec.sink_min, spec.sink_max);
        // Visual slots are 1..num_visual; the answer never sits on a sink.
        const auto picks = rng.sample_without_replacement(spec.num_visual(), n_sinks + 1);
        const int answer_slot = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(picks.size())));
        std::vector<int> sink_pos;
        int answer_pos = 0;
        for (std::size_t i = 0; i < picks.size(); ++i) {
            if (static_cast<int>(i) == answer_slot) {
                answer_pos = picks[i] + 1;
            } else {
                sink_pos.push_back(picks[i] + 1);
            }
        }
        auto rec = make_sample(spec, vocab, s, answer_class, answer_pos, sink_pos);
        bundle.annotations.push_back(annotate(spec, rec, answer_class, answer_pos));
        bundle.samples.push_back(std::move(rec));
    }

    // Calibrate the fallback decision weight. The query row's softmax only
    // depends on how many sinks are present, so one probe per sink count
    // covers the whole corpus. Runs on the already-quantized weights.
    intervene::InterventionPlan var_plan;
    var_plan.dims = bundle.dims;
    intervene::VarParams params;
    params.tau = 20.0;
    params.rho = 0.0;
    params.p = 0.6;
    var_plan.var = params;
    const intervene::InterventionPlan empty_plan;

    double max_base = 0.0;
    double min_base = 1.0;
    double min_var = 1.0;
    for (int n_sinks = spec.sink_min; n_sinks <= spec.sink_max; ++n_sinks) {
        std::vector<int> sink_pos;
        for (int i = 0; i < n_sinks; ++i) sink_pos.push_back(i + 2);
        const auto probe = make_sample(spec, vocab, 9999, 0, 1, sink_pos);
        const auto layout = probe.layout();
        const auto query_row = static_cast<std::size_t>(spec.seq_len() - 1);
        const auto ans_col = static_cast<std::size_t>(*probe.answer_position);

        const auto base_trace = tinylmm::forward(bundle.model, probe.ids, layout, empty_plan);
        const double base_alpha = base_trace.attn_post[0][0](query_row, ans_col);
        const auto var_trace = tinylmm::forward(bundle.model, probe.ids, layout, var_plan);
        const double var_alpha = var_trace.attn_post[0][0](query_row, ans_col);

        bundle.baseline_alpha.push_back(base_alpha);
        bundle.var_alpha.push_back(var_alpha);
        max_base = std::max(max_base, base_alpha);
        min_base = std::min(min_base, base_alpha);
        min_var = std::min(min_var, var_alpha);
    }

    if (spec.preset == "steal") {
        if (min_var < kMinStealGap * max_base) {
            throw std::runtime_error("synth_fixture: steal preset has no margin between baseline (" +
                                     std::to_string(max_base) + ") and redistributed (" +
                                     std::to_string(min_var) + ") attention");
        }
        bundle.theta = std::sqrt(max_base * min_var);
    } else {
        bundle.theta = kBaselineMarginScale * min_base;
    }
    bundle.theta = static_cast<double>(static_cast<float>(bundle.theta));
    bundle.model.unembedding(static_cast<std::size_t>(dims.self_marker), FixtureVocab::kDunno) =
        bundle.theta;
    return bundle;
}

void write_fixture(const FixtureBundle& bundle, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    tinylmm::save_weights(bundle.model, (dir / "model.weights").string());
    tinylmm::save_dataset(bundle.samples, (dir / "dataset.jsonl").string());
    metrics::save_annotations(bundle.annotations, (dir / "annotations.jsonl").string());

    sinkdetect::SinkRegistry registry;
    registry.add(bundle.dims.model_id, bundle.dims.dims);
    registry.write_file((dir / "registry.json").string());

    nlohmann::ordered_json doc;
    doc["preset"] = bundle.spec.preset;
    doc["num_samples"] = bundle.spec.num_samples;
    doc["seed"] = bundle.spec.seed;
    doc["model_id"] = bundle.spec.resolved_model_id();
    doc["grid"] = {{"width", bundle.spec.grid_width}, {"height", bundle.spec.grid_height}};
    doc["model"] = {{"num_layers", bundle.spec.num_layers},
                    {"num_heads", bundle.spec.num_heads},
                    {"model_dim", bundle.spec.model_dim},
                    {"mlp_dim", bundle.spec.mlp_dim}};
    doc["sink_dims"] = std::vector<int>(bundle.spec.sink_dims.begin(), bundle.spec.sink_dims.end());
    doc["sink_range"] = {bundle.spec.sink_min, bundle.spec.sink_max};
    doc["scores"] = {{"visual", bundle.spec.visual_score}, {"sink", bundle.spec.resolved_sink_score()}};
    doc["calibration"] = {{"theta", bundle.theta},
                          {"baseline_alpha", bundle.baseline_alpha},
                          {"var_alpha", bundle.var_alpha}};
    std::ofstream out(dir / "fixture.json");
    if (!out) throw std::runtime_error("write_fixture: cannot write fixture.json");
    out << doc.dump(2) << '\n';
}

}  // namespace sinklab::fixture
