#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tgnn/linalg.hpp"
#include "tgnn/types.hpp"

namespace tgnn {

// Phi(dt) = cos(omega * dt + phi), elementwise.
struct CosineEncoder {
  Vec omega;
  Vec phi;

  std::size_t dim() const { return omega.size(); }
  Vec encode(double dt) const;

  bool operator==(const CosineEncoder&) const = default;
};

// Equal-frequency lookup table replacing the cosine encoder. Interval k covers
// (boundaries[k-1], boundaries[k]]; the last interval is unbounded above.
struct TimeLut {
  Vec boundaries;
  std::vector<Vec> entries;
  // consumer name -> per-entry product weight_block * entries[k]
  std::map<std::string, std::vector<Vec>> fused_products;

  std::size_t size() const { return entries.size(); }
  std::size_t lookup(double dt) const;
  const std::vector<Vec>& fused(const std::string& consumer) const;

  bool operator==(const TimeLut&) const = default;
};

inline constexpr std::size_t kDefaultLutSize = 128;

// Builds a K-interval equal-frequency table over dt_samples. Boundaries are
// sorted-sample values at the i/K quantile positions; duplicated boundaries
// merge, so the result may have fewer than K intervals. Entry k encodes the
// mean of its samples (an empty last interval uses its lower edge).
TimeLut build_lut(std::span<const double> dt_samples, std::size_t k,
                  const CosineEncoder& encoder);

// Returns a copy of lut with fused_products[consumer][k] = weight_block * entries[k].
TimeLut fuse_weights(const TimeLut& lut, const std::string& consumer, const Matrix& weight_block);

// Per-interval sample counts of dt_samples against lut (diagnostics and tests).
std::vector<std::size_t> interval_counts(const TimeLut& lut, std::span<const double> dt_samples);

}  // namespace tgnn

namespace tgnn {

// LUT consumers: the time-encoding column blocks that get pre-multiplied.
inline const std::string kConsumerGruR = "gru_r";
inline const std::string kConsumerGruZ = "gru_z";
inline const std::string kConsumerGruN = "gru_n";
inline const std::string kConsumerSatV = "sat_v";

// Source of the W * Phi(dt) term for a weight matrix whose time block starts
// at a given column: either evaluate the cosine encoder and multiply, or read
// the fused LUT product (no MACs).
class TimePath {
 public:
  using Observer = std::function<void(double)>;

  static TimePath cosine(const CosineEncoder& encoder) { return TimePath(&encoder, nullptr); }
  static TimePath lut(const TimeLut& table) { return TimePath(nullptr, &table); }

  bool uses_lut() const { return lut_ != nullptr; }
  const TimeLut* table() const { return lut_; }
  std::size_t dim() const;

  // Phi(dt) on the cosine path, the interval entry on the LUT path.
  Vec encode(double dt) const;

  // out = w[:, offset : offset + d_time] * Phi(dt), or the fused product.
  void contribution(const Matrix& w, std::size_t offset, double dt, const std::string& consumer,
                    std::span<double> out, OpCounter* ops) const;

  // Called with every dt that goes through contribution(); must be thread-safe
  // if the path is shared across threads.
  void set_observer(const Observer* observer) { observer_ = observer; }

 private:
  TimePath(const CosineEncoder* c, const TimeLut* l) : cosine_(c), lut_(l) {}

  const CosineEncoder* cosine_;
  const TimeLut* lut_;
  const Observer* observer_ = nullptr;
};

}  // namespace tgnn
