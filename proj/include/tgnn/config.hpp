#pragma once

#include <cstddef>
#include <string>

#include "tgnn/memory_update.hpp"

namespace tgnn {

enum class Variant { baseline, sat, sat_lut, sat_lut_np };

// "baseline", "sat", "sat+lut", "sat+lut+np"
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

inline bool uses_simplified_attention(Variant v) { return v != Variant::baseline; }
inline bool uses_lut(Variant v) { return v == Variant::sat_lut || v == Variant::sat_lut_np; }
inline bool prunes_neighbors(Variant v) { return v == Variant::sat_lut_np; }

struct BatchPolicy {
  enum class Kind { fixed_count, fixed_window };
  Kind kind = Kind::fixed_count;
  std::size_t count = 200;
  double window_seconds = 900.0;

  static BatchPolicy fixed_count(std::size_t n) { return {Kind::fixed_count, n, 0.0}; }
  static BatchPolicy fixed_window(double seconds) { return {Kind::fixed_window, 0, seconds}; }
};

struct EngineConfig {
  std::size_t d_mem = 0;
  std::size_t d_edge = 0;
  std::size_t d_feat = 0;
  std::size_t d_time = 0;
  std::size_t d_emb = 0;
  std::size_t mr = 10;      // neighbor ring capacity
  std::size_t n = 10;       // neighbor slots fed to attention
  std::size_t budget = 10;  // pruning budget, used by sat+lut+np only
  Variant variant = Variant::baseline;
  BatchPolicy batch;
  std::size_t n_cu = 1;
  bool updater_enabled = true;
  std::size_t updater_lines = 64;
  std::size_t scan_width = 3;
  std::size_t threads = 1;
  Precision precision = Precision::f64;

  // Neighbor slots whose values are computed in the steady state.
  std::size_t kept_slots() const { return prunes_neighbors(variant) ? budget : n; }
  std::size_t raw_message_len() const { return 2 * d_mem + d_edge; }

  // Throws ConfigError unless 1 <= budget <= n <= mr and the rest is sane.
  void validate() const;
};

}  // namespace tgnn
