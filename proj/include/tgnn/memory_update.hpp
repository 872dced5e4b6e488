#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tgnn/graph_store.hpp"
#include "tgnn/linalg.hpp"
#include "tgnn/time_encoding.hpp"

namespace tgnn {

// GRU cell weights. Input matrices are d_mem x (2*d_mem + d_edge + d_time)
// with the time block in the trailing d_time columns.
struct GruParams {
  Matrix W_ir, W_iz, W_in;
  Matrix W_hr, W_hz, W_hn;
  Vec b_ir, b_iz, b_in;
  Vec b_hr, b_hz, b_hn;

  std::size_t d_mem() const { return W_hr.rows(); }
  // Throws ConfigError on any shape inconsistency.
  void validate(std::size_t d_mem, std::size_t d_edge, std::size_t d_time) const;

  bool operator==(const GruParams&) const = default;
};

struct RawMessage {
  Vec raw_message;
  Timestamp msg_timestamp = 0.0;
};

// (src message, dst message): s_src || s_dst || f_e and s_dst || s_src || f_e.
std::pair<RawMessage, RawMessage> generate_messages(const TemporalEdge& edge,
                                                    std::span<const double> s_src,
                                                    std::span<const double> s_dst);

struct PendingMessage {
  Vec raw_message;
  Timestamp msg_timestamp = 0.0;
  std::uint64_t stream_order = 0;
};

// Most-recent aggregator: maximal timestamp, ties to the larger stream order.
// The list must be non-empty.
const PendingMessage& aggregate_most_recent(std::span<const PendingMessage> messages);

enum class Precision { f64, f32 };

// New memory from the cached raw message consumed at `now`:
//   m = raw || Phi(now - msg_timestamp)
//   r = sigma(W_ir m + b_ir + W_hr s + b_hr), z likewise
//   n = tanh(W_in m + b_in + r * (W_hn s + b_hn))
//   out = (1 - z) * n + z * s
// On the LUT path the W_i* Phi terms come from the fused products.
// Throws PreconditionError when now < msg_timestamp.
Vec gru_update(std::span<const double> raw_message, Timestamp msg_timestamp, Timestamp now,
               std::span<const double> s, const GruParams& params, const TimePath& time,
               OpCounter* ops = nullptr, Precision precision = Precision::f64);

// MACs of one GRU update: three input and three hidden projections plus the
// three elementwise products. The LUT path drops 3 * d_time * d_mem.
std::uint64_t gru_macs(std::size_t d_mem, std::size_t d_edge, std::size_t d_time, bool lut);

}  // namespace tgnn
