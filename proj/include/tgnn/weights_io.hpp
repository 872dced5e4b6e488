#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tgnn/model.hpp"

namespace tgnn {

// Weights document layout:
//   { "format": "tgnn-weights", "version": 1,
//     "arrays": { "<name>": { "shape": [rows, cols] | [len], "data": [...] } } }
// Names: gru.{W,b}_{ir,iz,in,hr,hz,hn}, time.omega, time.phi, merge.W_s,
// merge.b_s, attn.{W,b}_{q,k,v}, sat.a, sat.W_t, sat.{W,b}_{v,o},
// lut.boundaries, lut.entries, lut.fused.<consumer>.
// Values are written with round-trip precision.
nlohmann::json weights_to_json(const ModelParams& params);
// Throws SchemaError on unknown names, bad shapes or element counts, and on
// partial optional blocks.
ModelParams weights_from_json(const nlohmann::json& doc);

void save_weights(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_weights(const std::filesystem::path& path);

// Parses a whole file as JSON. Syntax errors become Error naming the file.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tgnn
