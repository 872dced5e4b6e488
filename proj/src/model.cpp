#include "tgnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tgnn {

AttnDims attn_dims(const EngineConfig& c) {
  return AttnDims{c.d_mem, c.d_edge, c.d_feat, c.d_time, c.d_emb};
}

namespace {

void check_shapes(const ModelParams& params, const EngineConfig& config) {
  const auto& [encoder, gru, merge, vanilla, simplified, value, lut] = params;
  if (encoder.omega.size() != config.d_time || encoder.phi.size() != config.d_time) {
    throw ConfigError("time encoder omega/phi must have length d_time");
  }
  gru.validate(config.d_mem, config.d_edge, config.d_time);
  const AttnDims dims = attn_dims(config);
  tgnn::validate(merge, dims);

  if (config.variant == Variant::baseline) {
    if (!vanilla) throw SchemaError("variant baseline needs the attn.* (vanilla attention) arrays");
    tgnn::validate(*vanilla, dims);
  } else {
    if (!simplified) {
      throw SchemaError("variant " + to_string(config.variant) + " needs sat.a and sat.W_t");
    }
    if (!value) {
      throw SchemaError("variant " + to_string(config.variant) +
                        " needs sat.W_v, sat.b_v, sat.W_o and sat.b_o");
    }
    tgnn::validate(*simplified, config.n);
    tgnn::validate(*value, dims);
  }
  if (vanilla) tgnn::validate(*vanilla, dims);

  if (uses_lut(config.variant)) {
    if (!lut) throw SchemaError("variant " + to_string(config.variant) + " needs the lut.* arrays");
  }
  if (lut) {
    if (lut->entries.size() != lut->boundaries.size() + 1) {
      throw SchemaError("lut.entries must have one more row than lut.boundaries");
    }
    for (const Vec& e : lut->entries) {
      if (e.size() != config.d_time) throw ConfigError("lut entries must have length d_time");
    }
    for (std::size_t i = 1; i < lut->boundaries.size(); ++i) {
      if (lut->boundaries[i] < lut->boundaries[i - 1]) {
        throw ConfigError("lut.boundaries must be non-decreasing");
      }
    }
    for (const auto& [name, products] : lut->fused_products) {
      if (products.size() != lut->entries.size()) {
        throw ConfigError("lut.fused." + name + " must have one row per entry");
      }
      const std::size_t want = name == kConsumerSatV ? config.d_emb : config.d_mem;
      for (const Vec& p : products) {
        if (p.size() != want) throw ConfigError("lut.fused." + name + " has the wrong width");
      }
    }
  }
}

}  // namespace

// Weights that disagree with the configured dims are a schema problem.
void ModelParams::validate(const EngineConfig& config) const {
  config.validate();
  try {
    check_shapes(*this, config);
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
}

TimeLut fuse_all(const TimeLut& lut, const ModelParams& p, const EngineConfig& c) {
  const std::size_t raw = c.raw_message_len();
  TimeLut out = fuse_weights(lut, kConsumerGruR, p.gru.W_ir.column_block(raw, c.d_time));
  out = fuse_weights(out, kConsumerGruZ, p.gru.W_iz.column_block(raw, c.d_time));
  out = fuse_weights(out, kConsumerGruN, p.gru.W_in.column_block(raw, c.d_time));
  if (p.value) {
    out = fuse_weights(out, kConsumerSatV,
                       p.value->W_v.column_block(c.d_mem + c.d_edge, c.d_time));
  }
  return out;
}

namespace {

class ParamRng {
 public:
  ParamRng(std::uint64_t seed, double scale) : rng_(seed), scale_(scale) {}

  Matrix matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    const double bound = scale_ / std::sqrt(static_cast<double>(std::max<std::size_t>(cols, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& x : m.data()) x = dist(rng_);
    return m;
  }

  Vec vec(std::size_t n, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Vec v(n);
    for (double& x : v) x = dist(rng_);
    return v;
  }

 private:
  std::mt19937_64 rng_;
  double scale_;
};

}  // namespace

ModelParams random_params(const EngineConfig& c, std::uint64_t seed, double scale) {
  ParamRng rng(seed, scale);
  const std::size_t D = c.d_mem, E = c.d_edge, F = c.d_feat, T = c.d_time, O = c.d_emb;
  const std::size_t full = 2 * D + E + T;
  ModelParams p;
  // geometric frequencies: omega_i = 10^(-9 i / T)
  p.encoder.omega.resize(T);
  for (std::size_t i = 0; i < T; ++i) {
    p.encoder.omega[i] = std::pow(10.0, -9.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(T, 1)));
  }
  p.encoder.phi = rng.vec(T, 0.1);

  p.gru.W_ir = rng.matrix(D, full);
  p.gru.W_iz = rng.matrix(D, full);
  p.gru.W_in = rng.matrix(D, full);
  p.gru.W_hr = rng.matrix(D, D);
  p.gru.W_hz = rng.matrix(D, D);
  p.gru.W_hn = rng.matrix(D, D);
  p.gru.b_ir = rng.vec(D, 0.1);
  p.gru.b_iz = rng.vec(D, 0.1);
  p.gru.b_in = rng.vec(D, 0.1);
  p.gru.b_hr = rng.vec(D, 0.1);
  p.gru.b_hz = rng.vec(D, 0.1);
  p.gru.b_hn = rng.vec(D, 0.1);

  p.merge.W_s = rng.matrix(D, F);
  p.merge.b_s = rng.vec(D, 0.1);

  VanillaAttnParams v;
  v.W_q = rng.matrix(O, D + T);
  v.b_q = rng.vec(O, 0.1);
  v.W_k = rng.matrix(O, D + E + T);
  v.b_k = rng.vec(O, 0.1);
  v.W_v = rng.matrix(O, D + E + T);
  v.b_v = rng.vec(O, 0.1);
  p.vanilla = std::move(v);

  SimplifiedAttnParams s;
  s.a = rng.vec(c.n, 0.5);
  s.W_t = rng.matrix(c.n, c.n);
  p.simplified = std::move(s);

  ValueTransform vt;
  vt.W_v = rng.matrix(O, D + E + T);
  vt.b_v = rng.vec(O, 0.1);
  vt.W_o = rng.matrix(O, O + D);
  vt.b_o = rng.vec(O, 0.1);
  p.value = std::move(vt);
  return p;
}

}  // namespace tgnn
