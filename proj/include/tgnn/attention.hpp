#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tgnn/linalg.hpp"
#include "tgnn/time_encoding.hpp"
#include "tgnn/types.hpp"

namespace tgnn {

// Logit value of a masked slot. Anything at or below it counts as masked.
inline constexpr double kMaskedLogit = std::numeric_limits<double>::lowest();

inline bool is_masked_logit(double x) { return !(x > kMaskedLogit); }

// f' = s + W_s f + b_s
struct FeatureMerge {
  Matrix W_s;  // d_mem x d_feat
  Vec b_s;     // d_mem

  bool operator==(const FeatureMerge&) const = default;
};

// Teacher attention. W_q consumes [f' || Phi(0)], W_k and W_v consume
// [f' || e || Phi(dt)]; all produce d_emb outputs.
struct VanillaAttnParams {
  Matrix W_q;
  Vec b_q;
  Matrix W_k;
  Vec b_k;
  Matrix W_v;
  Vec b_v;

  bool operator==(const VanillaAttnParams&) const = default;
};

// Student logits a + W_t dt over n neighbor slots.
struct SimplifiedAttnParams {
  Vec a;       // n
  Matrix W_t;  // n x n

  std::size_t n() const { return a.size(); }
  bool operator==(const SimplifiedAttnParams&) const = default;
};

// Student value projection (same block layout as the teacher's W_v) and the
// output transform W_o [aggregate || f'_self] + b_o.
struct ValueTransform {
  Matrix W_v;  // d_emb x (d_mem + d_edge + d_time)
  Vec b_v;
  Matrix W_o;  // d_emb x (d_emb + d_mem)
  Vec b_o;

  bool operator==(const ValueTransform&) const = default;
};

struct AttnDims {
  std::size_t d_mem = 0;
  std::size_t d_edge = 0;
  std::size_t d_feat = 0;
  std::size_t d_time = 0;
  std::size_t d_emb = 0;
};

void validate(const FeatureMerge& p, const AttnDims& d);
void validate(const VanillaAttnParams& p, const AttnDims& d);
void validate(const SimplifiedAttnParams& p, std::size_t n);
void validate(const ValueTransform& p, const AttnDims& d);

struct SelfInput {
  Vec memory;
  Vec features;
  Timestamp now = 0.0;
};

struct NeighborInput {
  Vec memory;
  Vec features;
  Vec edge_features;
  Timestamp timestamp = 0.0;
  bool masked = true;
};

Vec feature_merge(std::span<const double> memory, std::span<const double> features,
                  const FeatureMerge& merge, OpCounter* ops);

// logits = a + W_t dt with dt zeroed on masked slots, masked slots forced to
// kMaskedLogit. Depends on timestamps only.
Vec simplified_logits(std::span<const double> dt_vec, const std::vector<bool>& mask,
                      const SimplifiedAttnParams& params, OpCounter* ops = nullptr);

// Indices (ascending) of the min(budget, #unmasked) largest unmasked logits;
// ties go to the smaller index.
std::vector<std::size_t> prune_topk(std::span<const double> logits, std::size_t budget);

// Max-subtracted softmax; masked entries get 0. Throws EmptyAttentionError when
// every entry is masked.
Vec masked_softmax(std::span<const double> logits);

// Teacher embedding: softmax(q K^T / sqrt(n_valid)) V over unmasked slots, or
// V of the self node at dt = 0 when every slot is masked. When `logits_out` is
// given it receives the scaled logits (masked slots at kMaskedLogit).
Vec vanilla_attention(const SelfInput& self, std::span<const NeighborInput> neighbors,
                      const FeatureMerge& merge, const VanillaAttnParams& params,
                      const CosineEncoder& encoder, OpCounter* ops = nullptr,
                      Vec* logits_out = nullptr);

// Result of the timestamp-only phase of the student attention: which slots
// survive pruning and their attention weights.
struct NeighborSelection {
  Vec logits;
  std::vector<std::size_t> kept;  // ascending slot indices
  Vec weights;                    // one per kept slot, sums to 1
};

NeighborSelection select_neighbors(std::span<const Timestamp> timestamps,
                                   const std::vector<bool>& mask, Timestamp now,
                                   std::size_t budget, const SimplifiedAttnParams& params,
                                   OpCounter* ops = nullptr);

// Student embedding from a selection. `kept_inputs[i]` holds the neighbor in
// slot selection.kept[i]; nothing else is read. With no kept slot the self
// node's value at dt = 0 is aggregated with weight 1.
Vec aggregate_selected(const SelfInput& self, const NeighborSelection& selection,
                       std::span<const NeighborInput> kept_inputs, const FeatureMerge& merge,
                       const ValueTransform& transform, const TimePath& time,
                       OpCounter* ops = nullptr);

// select_neighbors + aggregate_selected over a fully materialised slot list.
// `value_slots`, when given, receives the slots whose V was computed.
Vec simplified_embedding(const SelfInput& self, std::span<const NeighborInput> neighbors,
                         std::size_t budget, const SimplifiedAttnParams& params,
                         const FeatureMerge& merge, const ValueTransform& transform,
                         const TimePath& time, OpCounter* ops = nullptr,
                         std::vector<std::size_t>* value_slots = nullptr);

}  // namespace tgnn
