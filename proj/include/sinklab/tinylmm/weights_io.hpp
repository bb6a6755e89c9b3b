#pragma once

#include <string>

#include "sinklab/tinylmm/model.hpp"

namespace sinklab::tinylmm {

// Weight file layout: 8-byte little-endian header length, JSON header
// (config, model_id, tensor manifest with name/shape/byte offset), then one
// raw blob of little-endian float32 in row-major order. Values are widened
// to float64 on load.
void save_weights(const ModelBundle& model, const std::string& path);
ModelBundle load_weights(const std::string& path);

}  // namespace sinklab::tinylmm
