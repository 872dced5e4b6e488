#pragma once

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "oracle/reference.hpp"
#include "tgnn/model.hpp"

namespace testing_support {

inline ref::M to_ref(const tgnn::Matrix& m) {
  ref::M out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

inline ref::Gru to_ref(const tgnn::GruParams& p) {
  return {to_ref(p.W_ir), to_ref(p.W_iz), to_ref(p.W_in), to_ref(p.W_hr), to_ref(p.W_hz),
          to_ref(p.W_hn), p.b_ir,         p.b_iz,         p.b_in,         p.b_hr,
          p.b_hz,         p.b_hn};
}

inline ref::Vanilla to_ref_vanilla(const tgnn::ModelParams& p) {
  const auto& v = *p.vanilla;
  return {to_ref(p.merge.W_s), p.merge.b_s, to_ref(v.W_q), to_ref(v.W_k), to_ref(v.W_v),
          v.b_q,              v.b_k,       v.b_v,         p.encoder.omega, p.encoder.phi};
}

inline ref::Simplified to_ref_simplified(const tgnn::ModelParams& p) {
  return {to_ref(p.merge.W_s), p.merge.b_s,       p.simplified->a,   to_ref(p.simplified->W_t),
          to_ref(p.value->W_v), to_ref(p.value->W_o), p.value->b_v, p.value->b_o,
          p.encoder.omega,      p.encoder.phi};
}

inline tgnn::Vec random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  tgnn::Vec v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// max_i |a_i - b_i| / max(1, |b_i|)
inline double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return worst;
}

inline bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  }
  return true;
}

// Small config with every dimension drawn from [1, max_d].
inline tgnn::EngineConfig random_config(std::mt19937_64& rng, std::size_t max_d,
                                        std::size_t max_n, tgnn::Variant variant) {
  tgnn::EngineConfig c;
  c.d_mem = pick(rng, 1, max_d);
  c.d_edge = pick(rng, 0, max_d);
  c.d_feat = pick(rng, 0, max_d);
  c.d_time = pick(rng, 1, max_d);
  c.d_emb = pick(rng, 1, max_d);
  c.n = pick(rng, 1, max_n);
  c.mr = c.n + pick(rng, 0, 2);
  c.budget = pick(rng, 1, c.n);
  c.variant = variant;
  return c;
}

// Slot list with leading padding, as the store returns it.
inline std::vector<tgnn::NeighborInput> random_neighbors(std::mt19937_64& rng,
                                                         const tgnn::EngineConfig& c,
                                                         double now, std::size_t valid) {
  std::vector<tgnn::NeighborInput> out(c.n);
  std::uniform_real_distribution<double> age(0.0, 50.0);
  for (std::size_t j = c.n - valid; j < c.n; ++j) {
    auto& nb = out[j];
    nb.memory = random_vec(rng, c.d_mem);
    nb.features = random_vec(rng, c.d_feat);
    nb.edge_features = random_vec(rng, c.d_edge);
    nb.timestamp = now - age(rng);
    nb.masked = false;
  }
  for (std::size_t j = 0; j < c.n - valid; ++j) {
    out[j].memory.assign(c.d_mem, 0.0);
    out[j].features.assign(c.d_feat, 0.0);
    out[j].edge_features.assign(c.d_edge, 0.0);
  }
  return out;
}

inline std::vector<ref::Node> to_ref(const std::vector<tgnn::NeighborInput>& nbrs) {
  std::vector<ref::Node> out;
  for (const auto& nb : nbrs) {
    out.push_back({nb.memory, nb.features, nb.edge_features, nb.timestamp, nb.masked});
  }
  return out;
}

}  // namespace testing_support
