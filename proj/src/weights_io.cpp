#include "tgnn/weights_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace tgnn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "tgnn-weights";

const char* const kGruNames[] = {"W_ir", "W_iz", "W_in", "W_hr", "W_hz", "W_hn"};
const char* const kGruBiasNames[] = {"b_ir", "b_iz", "b_in", "b_hr", "b_hz", "b_hn"};

json array_json(std::vector<std::size_t> shape, const std::vector<double>& data) {
  return json{{"shape", std::move(shape)}, {"data", data}};
}
json matrix_json(const Matrix& m) { return array_json({m.rows(), m.cols()}, m.data()); }
json vector_json(const Vec& v) { return array_json({v.size()}, v); }
json rows_json(const std::vector<Vec>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const Vec& r : rows) {
    if (r.size() != cols) throw SchemaError("ragged table in weights");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return array_json({rows.size(), cols}, flat);
}

class Reader {
 public:
  explicit Reader(const json& arrays) : arrays_(arrays) {
    if (!arrays_.is_object()) throw SchemaError("weights: 'arrays' must be an object");
  }

  bool has(const std::string& name) const { return arrays_.contains(name); }

  Matrix matrix(const std::string& name) {
    auto [shape, data] = fetch(name);
    if (shape.size() != 2) throw SchemaError("weights: '" + name + "' must be 2-D");
    return Matrix(shape[0], shape[1], std::move(data));
  }

  Vec vector(const std::string& name) {
    auto [shape, data] = fetch(name);
    if (shape.size() != 1) throw SchemaError("weights: '" + name + "' must be 1-D");
    return data;
  }

  std::vector<Vec> rows(const std::string& name) {
    Matrix m = matrix(name);
    std::vector<Vec> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
    return out;
  }

  void check_all_used() const {
    for (const auto& [name, _] : arrays_.items()) {
      if (!used_.count(name)) throw SchemaError("weights: unknown array '" + name + "'");
    }
  }

 private:
  std::pair<std::vector<std::size_t>, std::vector<double>> fetch(const std::string& name) {
    if (!has(name)) throw SchemaError("weights: missing array '" + name + "'");
    used_.insert(name);
    const json& a = arrays_.at(name);
    try {
      auto shape = a.at("shape").get<std::vector<std::size_t>>();
      auto data = a.at("data").get<std::vector<double>>();
      std::size_t expected = 1;
      for (std::size_t s : shape) expected *= s;
      if (data.size() != expected) {
        throw SchemaError("weights: '" + name + "' has " + std::to_string(data.size()) +
                          " values for shape of " + std::to_string(expected));
      }
      return {std::move(shape), std::move(data)};
    } catch (const json::exception& e) {
      throw SchemaError("weights: malformed array '" + name + "': " + e.what());
    }
  }

  const json& arrays_;
  std::set<std::string> used_;
};

}  // namespace

json weights_to_json(const ModelParams& p) {
  json arrays = json::object();
  const Matrix* gw[] = {&p.gru.W_ir, &p.gru.W_iz, &p.gru.W_in,
                        &p.gru.W_hr, &p.gru.W_hz, &p.gru.W_hn};
  const Vec* gb[] = {&p.gru.b_ir, &p.gru.b_iz, &p.gru.b_in,
                     &p.gru.b_hr, &p.gru.b_hz, &p.gru.b_hn};
  for (int i = 0; i < 6; ++i) {
    arrays[std::string("gru.") + kGruNames[i]] = matrix_json(*gw[i]);
    arrays[std::string("gru.") + kGruBiasNames[i]] = vector_json(*gb[i]);
  }
  arrays["time.omega"] = vector_json(p.encoder.omega);
  arrays["time.phi"] = vector_json(p.encoder.phi);
  arrays["merge.W_s"] = matrix_json(p.merge.W_s);
  arrays["merge.b_s"] = vector_json(p.merge.b_s);
  if (p.vanilla) {
    arrays["attn.W_q"] = matrix_json(p.vanilla->W_q);
    arrays["attn.b_q"] = vector_json(p.vanilla->b_q);
    arrays["attn.W_k"] = matrix_json(p.vanilla->W_k);
    arrays["attn.b_k"] = vector_json(p.vanilla->b_k);
    arrays["attn.W_v"] = matrix_json(p.vanilla->W_v);
    arrays["attn.b_v"] = vector_json(p.vanilla->b_v);
  }
  if (p.simplified) {
    arrays["sat.a"] = vector_json(p.simplified->a);
    arrays["sat.W_t"] = matrix_json(p.simplified->W_t);
  }
  if (p.value) {
    arrays["sat.W_v"] = matrix_json(p.value->W_v);
    arrays["sat.b_v"] = vector_json(p.value->b_v);
    arrays["sat.W_o"] = matrix_json(p.value->W_o);
    arrays["sat.b_o"] = vector_json(p.value->b_o);
  }
  if (p.lut) {
    arrays["lut.boundaries"] = vector_json(p.lut->boundaries);
    arrays["lut.entries"] = rows_json(p.lut->entries);
    for (const auto& [consumer, table] : p.lut->fused_products) {
      arrays["lut.fused." + consumer] = rows_json(table);
    }
  }
  return json{{"format", kFormat}, {"version", 1}, {"arrays", std::move(arrays)}};
}

ModelParams weights_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != kFormat) {
    throw SchemaError("weights: not a tgnn-weights document");
  }
  if (doc.value("version", 0) != 1) throw SchemaError("weights: unsupported version");
  if (!doc.contains("arrays")) throw SchemaError("weights: missing 'arrays'");
  Reader in(doc.at("arrays"));
  ModelParams p;
  Matrix* gw[] = {&p.gru.W_ir, &p.gru.W_iz, &p.gru.W_in, &p.gru.W_hr, &p.gru.W_hz, &p.gru.W_hn};
  Vec* gb[] = {&p.gru.b_ir, &p.gru.b_iz, &p.gru.b_in, &p.gru.b_hr, &p.gru.b_hz, &p.gru.b_hn};
  for (int i = 0; i < 6; ++i) {
    *gw[i] = in.matrix(std::string("gru.") + kGruNames[i]);
    *gb[i] = in.vector(std::string("gru.") + kGruBiasNames[i]);
  }
  p.encoder.omega = in.vector("time.omega");
  p.encoder.phi = in.vector("time.phi");
  p.merge.W_s = in.matrix("merge.W_s");
  p.merge.b_s = in.vector("merge.b_s");

  auto block_present = [&](std::initializer_list<const char*> names) {
    std::size_t found = 0;
    for (const char* n : names) found += in.has(n) ? 1 : 0;
    if (found != 0 && found != names.size()) {
      throw SchemaError(std::string("weights: incomplete block starting at '") + *names.begin() +
                        "'");
    }
    return found != 0;
  };
  if (block_present({"attn.W_q", "attn.b_q", "attn.W_k", "attn.b_k", "attn.W_v", "attn.b_v"})) {
    p.vanilla = VanillaAttnParams{in.matrix("attn.W_q"), in.vector("attn.b_q"),
                                  in.matrix("attn.W_k"), in.vector("attn.b_k"),
                                  in.matrix("attn.W_v"), in.vector("attn.b_v")};
  }
  if (block_present({"sat.a", "sat.W_t"})) {
    p.simplified = SimplifiedAttnParams{in.vector("sat.a"), in.matrix("sat.W_t")};
  }
  if (block_present({"sat.W_v", "sat.b_v", "sat.W_o", "sat.b_o"})) {
    p.value = ValueTransform{in.matrix("sat.W_v"), in.vector("sat.b_v"), in.matrix("sat.W_o"),
                             in.vector("sat.b_o")};
  }
  if (block_present({"lut.boundaries", "lut.entries"})) {
    TimeLut lut;
    lut.boundaries = in.vector("lut.boundaries");
    lut.entries = in.rows("lut.entries");
    const std::string prefix = "lut.fused.";
    for (const auto& [name, _] : doc.at("arrays").items()) {
      if (name.rfind(prefix, 0) == 0) lut.fused_products[name.substr(prefix.size())] = in.rows(name);
    }
    if (lut.entries.size() != lut.boundaries.size() + 1) {
      throw SchemaError("weights: lut.entries needs one row more than lut.boundaries");
    }
    for (const auto& [consumer, table] : lut.fused_products) {
      if (table.size() != lut.entries.size()) {
        throw SchemaError("weights: lut.fused." + consumer + " row count differs from entries");
      }
    }
    p.lut = std::move(lut);
  }
  in.check_all_used();
  return p;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed: " + path.string());
}

void save_weights(const std::filesystem::path& path, const ModelParams& params) {
  write_text_file(path, weights_to_json(params).dump(1) + "\n");
}

ModelParams load_weights(const std::filesystem::path& path) {
  return weights_from_json(read_json_file(path));
}

}  // namespace tgnn
