#include "tgnn/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tgnn {

namespace {

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ConfigError(name + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void expect_len(const Vec& v, std::size_t n, const std::string& name) {
  if (v.size() != n) {
    throw ConfigError(name + " has length " + std::to_string(v.size()) + ", expected " +
                      std::to_string(n));
  }
}

// W [f' || e || Phi(dt)] + b with each block reduced separately and summed in
// a fixed order.
Vec value_projection(const Matrix& w, const Vec& b, std::span<const double> merged,
                     std::span<const double> edge, double dt, const TimePath& time,
                     const std::string& consumer, OpCounter* ops) {
  const std::size_t rows = w.rows();
  Vec p_mem(rows), p_edge(rows), p_time(rows);
  matvec_cols(w, 0, merged, p_mem, ops);
  matvec_cols(w, merged.size(), edge, p_edge, ops);
  time.contribution(w, merged.size() + edge.size(), dt, consumer, p_time, ops);
  Vec out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = ((p_mem[r] + p_edge[r]) + p_time[r]) + b[r];
  return out;
}

void accumulate_weighted(Vec& acc, double weight, std::span<const double> v, OpCounter* ops) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * v[i];
  count_macs(ops, acc.size());
}

}  // namespace

void validate(const FeatureMerge& p, const AttnDims& d) {
  expect_shape(p.W_s, d.d_mem, d.d_feat, "merge.W_s");
  expect_len(p.b_s, d.d_mem, "merge.b_s");
}

void validate(const VanillaAttnParams& p, const AttnDims& d) {
  expect_shape(p.W_q, d.d_emb, d.d_mem + d.d_time, "attn.W_q");
  expect_shape(p.W_k, d.d_emb, d.d_mem + d.d_edge + d.d_time, "attn.W_k");
  expect_shape(p.W_v, d.d_emb, d.d_mem + d.d_edge + d.d_time, "attn.W_v");
  expect_len(p.b_q, d.d_emb, "attn.b_q");
  expect_len(p.b_k, d.d_emb, "attn.b_k");
  expect_len(p.b_v, d.d_emb, "attn.b_v");
}

void validate(const SimplifiedAttnParams& p, std::size_t n) {
  expect_len(p.a, n, "sat.a");
  expect_shape(p.W_t, n, n, "sat.W_t");
}

void validate(const ValueTransform& p, const AttnDims& d) {
  expect_shape(p.W_v, d.d_emb, d.d_mem + d.d_edge + d.d_time, "sat.W_v");
  expect_len(p.b_v, d.d_emb, "sat.b_v");
  expect_shape(p.W_o, d.d_emb, d.d_emb + d.d_mem, "sat.W_o");
  expect_len(p.b_o, d.d_emb, "sat.b_o");
}

Vec feature_merge(std::span<const double> memory, std::span<const double> features,
                  const FeatureMerge& merge, OpCounter* ops) {
  Vec projected(merge.W_s.rows());
  matvec_cols(merge.W_s, 0, features, projected, ops);
  Vec out(memory.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (memory[i] + projected[i]) + merge.b_s[i];
  return out;
}

Vec simplified_logits(std::span<const double> dt_vec, const std::vector<bool>& mask,
                      const SimplifiedAttnParams& params, OpCounter* ops) {
  const std::size_t n = params.n();
  if (dt_vec.size() != n || mask.size() != n) {
    throw ConfigError("simplified_logits: expected " + std::to_string(n) + " slots");
  }
  Vec dt(n);
  for (std::size_t j = 0; j < n; ++j) dt[j] = mask[j] ? 0.0 : dt_vec[j];
  Vec logits(n);
  matvec_cols(params.W_t, 0, dt, logits, ops);
  for (std::size_t j = 0; j < n; ++j) logits[j] = mask[j] ? kMaskedLogit : params.a[j] + logits[j];
  return logits;
}

std::vector<std::size_t> prune_topk(std::span<const double> logits, std::size_t budget) {
  if (budget == 0) throw PreconditionError("pruning budget must be at least 1");
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (!is_masked_logit(logits[j])) candidates.push_back(j);
  }
  const std::size_t keep = std::min(budget, candidates.size());
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t x, std::size_t y) { return logits[x] > logits[y]; });
  candidates.resize(keep);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

Vec masked_softmax(std::span<const double> logits) {
  double max_logit = kMaskedLogit;
  bool any = false;
  for (double x : logits) {
    if (is_masked_logit(x)) continue;
    if (!any || x > max_logit) max_logit = x;
    any = true;
  }
  if (!any) throw EmptyAttentionError("softmax over an all-masked attention set");
  Vec out(logits.size(), 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (is_masked_logit(logits[j])) continue;
    out[j] = std::exp(logits[j] - max_logit);
    sum += out[j];
  }
  for (double& p : out) p /= sum;
  return out;
}

Vec vanilla_attention(const SelfInput& self, std::span<const NeighborInput> neighbors,
                      const FeatureMerge& merge, const VanillaAttnParams& params,
                      const CosineEncoder& encoder, OpCounter* ops, Vec* logits_out) {
  const TimePath time = TimePath::cosine(encoder);
  const Vec self_merged = feature_merge(self.memory, self.features, merge, ops);
  const std::size_t d_edge = params.W_k.cols() - self_merged.size() - encoder.dim();

  std::size_t n_valid = 0;
  for (const auto& nb : neighbors) n_valid += nb.masked ? 0 : 1;

  if (logits_out != nullptr) logits_out->assign(neighbors.size(), kMaskedLogit);
  if (n_valid == 0) {
    const Vec zero_edge(d_edge, 0.0);
    return value_projection(params.W_v, params.b_v, self_merged, zero_edge, 0.0, time, "", ops);
  }

  // q = W_q [f'_self || Phi(0)] + b_q
  const std::size_t rows = params.W_q.rows();
  Vec q_mem(rows), q_time(rows), q(rows);
  matvec_cols(params.W_q, 0, self_merged, q_mem, ops);
  time.contribution(params.W_q, self_merged.size(), 0.0, "", q_time, ops);
  for (std::size_t r = 0; r < rows; ++r) q[r] = (q_mem[r] + q_time[r]) + params.b_q[r];

  const double scale = 1.0 / std::sqrt(static_cast<double>(n_valid));
  Vec logits(neighbors.size(), kMaskedLogit);
  std::vector<Vec> values(neighbors.size());
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    const NeighborInput& nb = neighbors[j];
    if (nb.masked) continue;
    const double dt = self.now - nb.timestamp;
    const Vec merged = feature_merge(nb.memory, nb.features, merge, ops);
    const Vec key = value_projection(params.W_k, params.b_k, merged, nb.edge_features, dt, time,
                                     "", ops);
    values[j] = value_projection(params.W_v, params.b_v, merged, nb.edge_features, dt, time, "",
                                 ops);
    logits[j] = dot(q, key) * scale;
    count_macs(ops, rows + 1);
  }
  if (logits_out != nullptr) *logits_out = logits;

  const Vec alpha = masked_softmax(logits);
  Vec out(rows, 0.0);
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    if (!neighbors[j].masked) accumulate_weighted(out, alpha[j], values[j], ops);
  }
  return out;
}

NeighborSelection select_neighbors(std::span<const Timestamp> timestamps,
                                   const std::vector<bool>& mask, Timestamp now,
                                   std::size_t budget, const SimplifiedAttnParams& params,
                                   OpCounter* ops) {
  NeighborSelection sel;
  const bool any_valid = std::find(mask.begin(), mask.end(), false) != mask.end();
  if (!any_valid) {
    sel.logits.assign(mask.size(), kMaskedLogit);
    return sel;
  }
  Vec dt(timestamps.size());
  for (std::size_t j = 0; j < dt.size(); ++j) dt[j] = mask[j] ? 0.0 : now - timestamps[j];
  sel.logits = simplified_logits(dt, mask, params, ops);
  sel.kept = prune_topk(sel.logits, budget);

  Vec kept_logits(sel.logits.size(), kMaskedLogit);
  for (std::size_t j : sel.kept) kept_logits[j] = sel.logits[j];
  const Vec alpha = masked_softmax(kept_logits);
  for (std::size_t j : sel.kept) sel.weights.push_back(alpha[j]);
  return sel;
}

Vec aggregate_selected(const SelfInput& self, const NeighborSelection& selection,
                       std::span<const NeighborInput> kept_inputs, const FeatureMerge& merge,
                       const ValueTransform& transform, const TimePath& time, OpCounter* ops) {
  if (kept_inputs.size() != selection.kept.size()) {
    throw PreconditionError("aggregate_selected: one input per kept slot is required");
  }
  const Vec self_merged = feature_merge(self.memory, self.features, merge, ops);
  const std::size_t d_emb = transform.W_v.rows();
  const std::size_t d_edge = transform.W_v.cols() - self_merged.size() - time.dim();

  Vec aggregate(d_emb, 0.0);
  if (selection.kept.empty()) {
    const Vec zero_edge(d_edge, 0.0);
    aggregate = value_projection(transform.W_v, transform.b_v, self_merged, zero_edge, 0.0, time,
                                 kConsumerSatV, ops);
  } else {
    for (std::size_t i = 0; i < kept_inputs.size(); ++i) {
      const NeighborInput& nb = kept_inputs[i];
      const Vec merged = feature_merge(nb.memory, nb.features, merge, ops);
      const Vec value = value_projection(transform.W_v, transform.b_v, merged, nb.edge_features,
                                         self.now - nb.timestamp, time, kConsumerSatV, ops);
      accumulate_weighted(aggregate, selection.weights[i], value, ops);
    }
  }

  Vec p_agg(d_emb), p_self(d_emb), out(d_emb);
  matvec_cols(transform.W_o, 0, aggregate, p_agg, ops);
  matvec_cols(transform.W_o, d_emb, self_merged, p_self, ops);
  for (std::size_t r = 0; r < d_emb; ++r) out[r] = (p_agg[r] + p_self[r]) + transform.b_o[r];
  return out;
}

Vec simplified_embedding(const SelfInput& self, std::span<const NeighborInput> neighbors,
                         std::size_t budget, const SimplifiedAttnParams& params,
                         const FeatureMerge& merge, const ValueTransform& transform,
                         const TimePath& time, OpCounter* ops,
                         std::vector<std::size_t>* value_slots) {
  std::vector<Timestamp> ts(neighbors.size());
  std::vector<bool> mask(neighbors.size());
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    ts[j] = neighbors[j].timestamp;
    mask[j] = neighbors[j].masked;
  }
  const NeighborSelection sel = select_neighbors(ts, mask, self.now, budget, params, ops);
  std::vector<NeighborInput> kept;
  kept.reserve(sel.kept.size());
  for (std::size_t j : sel.kept) kept.push_back(neighbors[j]);
  if (value_slots != nullptr) *value_slots = sel.kept;
  return aggregate_selected(self, sel, kept, merge, transform, time, ops);
}

}  // namespace tgnn
