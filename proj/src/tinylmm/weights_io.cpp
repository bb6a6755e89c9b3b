#include "sinklab/tinylmm/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace sinklab::tinylmm {

namespace {

using nlohmann::ordered_json;

struct TensorRef {
    std::string name;
    const double* data;
    std::vector<std::size_t> shape;
};

std::size_t numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
}

void collect(const ModelBundle& m, std::vector<TensorRef>& out) {
    const auto d = static_cast<std::size_t>(m.config.model_dim);
    const auto dk = static_cast<std::size_t>(m.config.head_dim);
    const auto v = static_cast<std::size_t>(m.config.vocab_size);
    const auto mlp = static_cast<std::size_t>(m.config.mlp_dim);
    out.push_back({"token_embedding", m.token_embedding.data().data(), {v, d}});
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& layer = m.layers[l];
        const std::string p = "layers." + std::to_string(l) + ".";
        out.push_back({p + "attn_norm.scale", layer.attn_norm_scale.data(), {d}});
        for (std::size_t h = 0; h < layer.heads.size(); ++h) {
            const std::string hp = p + "heads." + std::to_string(h) + ".";
            out.push_back({hp + "wq", layer.heads[h].wq.data().data(), {d, dk}});
            out.push_back({hp + "wk", layer.heads[h].wk.data().data(), {d, dk}});
            out.push_back({hp + "wv", layer.heads[h].wv.data().data(), {d, dk}});
            out.push_back({hp + "wo", layer.heads[h].wo.data().data(), {dk, d}});
        }
        out.push_back({p + "mlp_norm.scale", layer.mlp_norm_scale.data(), {d}});
        out.push_back({p + "mlp.up", layer.mlp_up.data().data(), {d, mlp}});
        out.push_back({p + "mlp.down", layer.mlp_down.data().data(), {mlp, d}});
    }
    out.push_back({"final_norm.scale", m.final_norm_scale.data(), {d}});
    out.push_back({"unembedding", m.unembedding.data().data(), {d, v}});
}

void write_u64_le(std::ostream& out, std::uint64_t value) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw std::runtime_error("weight file: truncated header length");
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return value;
}

void write_f32_le(std::ostream& out, const double* src, std::size_t count) {
    std::vector<unsigned char> buf(count * 4);
    for (std::size_t i = 0; i < count; ++i) {
        const float f = static_cast<float>(src[i]);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        buf[i * 4 + 0] = static_cast<unsigned char>(bits & 0xff);
        buf[i * 4 + 1] = static_cast<unsigned char>((bits >> 8) & 0xff);
        buf[i * 4 + 2] = static_cast<unsigned char>((bits >> 16) & 0xff);
        buf[i * 4 + 3] = static_cast<unsigned char>((bits >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_f32_le(std::istream& in, double* dst, std::size_t count) {
    std::vector<unsigned char> buf(count * 4);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw std::runtime_error("weight file: truncated tensor blob");
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(buf[i * 4 + 0]) |
                                   (static_cast<std::uint32_t>(buf[i * 4 + 1]) << 8) |
                                   (static_cast<std::uint32_t>(buf[i * 4 + 2]) << 16) |
                                   (static_cast<std::uint32_t>(buf[i * 4 + 3]) << 24);
        float f;
        std::memcpy(&f, &bits, 4);
        dst[i] = static_cast<double>(f);
    }
}

}  // namespace

void save_weights(const ModelBundle& model, const std::string& path) {
    model.validate();
    std::vector<TensorRef> tensors;
    collect(model, tensors);

    ordered_json header;
    header["format"] = "sinklab-weights-v1";
    header["model_id"] = model.model_id;
    header["config"] = {{"num_layers", model.config.num_layers},
                        {"num_heads", model.config.num_heads},
                        {"model_dim", model.config.model_dim},
                        {"head_dim", model.config.head_dim},
                        {"mlp_dim", model.config.mlp_dim},
                        {"vocab_size", model.config.vocab_size},
                        {"max_seq_len", model.config.max_seq_len},
                        {"norm_epsilon", model.config.norm_epsilon}};
    ordered_json manifest = ordered_json::array();
    std::uint64_t offset = 0;
    for (const auto& t : tensors) {
        manifest.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
        offset += numel(t.shape) * 4;
    }
    header["tensors"] = manifest;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_weights: cannot write " + path);
    const std::string header_text = header.dump();
    write_u64_le(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& t : tensors) {
        write_f32_le(out, t.data, numel(t.shape));
    }
    if (!out) throw std::runtime_error("save_weights: write failed for " + path);
}

ModelBundle load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_weights: cannot open " + path);
    const std::uint64_t header_len = read_u64_le(in);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw std::runtime_error("load_weights: truncated header");
    const auto header = nlohmann::json::parse(header_text);
    if (header.value("format", std::string{}) != "sinklab-weights-v1") {
        throw std::runtime_error("load_weights: unrecognized format");
    }

    ModelConfig cfg;
    const auto& c = header.at("config");
    cfg.num_layers = c.at("num_layers").get<int>();
    cfg.num_heads = c.at("num_heads").get<int>();
    cfg.model_dim = c.at("model_dim").get<int>();
    cfg.head_dim = c.at("head_dim").get<int>();
    cfg.mlp_dim = c.at("mlp_dim").get<int>();
    cfg.vocab_size = c.at("vocab_size").get<int>();
    cfg.max_seq_len = c.at("max_seq_len").get<int>();
    cfg.norm_epsilon = c.at("norm_epsilon").get<double>();

    ModelBundle model = ModelBundle::zeros(cfg, header.value("model_id", std::string{}));
    std::vector<TensorRef> tensors;
    collect(model, tensors);

    const auto& manifest = header.at("tensors");
    if (manifest.size() != tensors.size()) {
        throw std::runtime_error("load_weights: manifest has " + std::to_string(manifest.size()) +
                                 " tensors, expected " + std::to_string(tensors.size()));
    }
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        const auto& entry = manifest[t];
        if (entry.at("name").get<std::string>() != tensors[t].name) {
            throw std::runtime_error("load_weights: unexpected tensor " +
                                     entry.at("name").get<std::string>());
        }
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        if (shape != tensors[t].shape) {
            throw std::runtime_error("load_weights: shape mismatch for " + tensors[t].name);
        }
        read_f32_le(in, const_cast<double*>(tensors[t].data), numel(shape));
    }
    model.validate();
    return model;
}

}  // namespace sinklab::tinylmm
