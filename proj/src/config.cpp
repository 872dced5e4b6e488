#include "tgnn/config.hpp"

namespace tgnn {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::sat: return "sat";
    case Variant::sat_lut: return "sat+lut";
    case Variant::sat_lut_np: return "sat+lut+np";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "sat") return Variant::sat;
  if (name == "sat+lut") return Variant::sat_lut;
  if (name == "sat+lut+np") return Variant::sat_lut_np;
  throw ConfigError("unknown model variant '" + name +
                    "' (expected baseline, sat, sat+lut or sat+lut+np)");
}

void EngineConfig::validate() const {
  if (n == 0) throw ConfigError("neighbor slot count n must be positive");
  if (n > mr) throw ConfigError("neighbor slot count n exceeds ring capacity mr");
  if (budget == 0 || budget > n) throw ConfigError("pruning budget must lie in [1, n]");
  if (d_mem == 0) throw ConfigError("d_mem must be positive");
  if (d_emb == 0) throw ConfigError("d_emb must be positive");
  if (n_cu == 0) throw ConfigError("n_cu must be positive");
  if (scan_width == 0) throw ConfigError("scan_width must be positive");
  if (updater_lines == 0 || updater_lines % n_cu != 0) {
    throw ConfigError("updater_lines must be a positive multiple of n_cu");
  }
  if (batch.kind == BatchPolicy::Kind::fixed_count && batch.count == 0) {
    throw ConfigError("fixed-count batch size must be positive");
  }
  if (batch.kind == BatchPolicy::Kind::fixed_window && !(batch.window_seconds > 0.0)) {
    throw ConfigError("batch window must be positive");
  }
}

}  // namespace tgnn
