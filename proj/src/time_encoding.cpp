#include "tgnn/time_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tgnn {

Vec CosineEncoder::encode(double dt) const {
  if (omega.size() != phi.size()) throw ConfigError("time encoder omega/phi length mismatch");
  Vec out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = std::cos(omega[i] * dt + phi[i]);
  return out;
}

std::size_t TimeLut::lookup(double dt) const {
  // smallest k with dt <= boundaries[k]
  auto it = std::lower_bound(boundaries.begin(), boundaries.end(), dt);
  return static_cast<std::size_t>(it - boundaries.begin());
}

const std::vector<Vec>& TimeLut::fused(const std::string& consumer) const {
  auto it = fused_products.find(consumer);
  if (it == fused_products.end()) {
    throw SchemaError("time LUT has no fused products for consumer '" + consumer + "'");
  }
  return it->second;
}

TimeLut build_lut(std::span<const double> dt_samples, std::size_t k,
                  const CosineEncoder& encoder) {
  if (k == 0) throw ConfigError("LUT size K must be positive");
  if (dt_samples.empty()) throw ConfigError("LUT construction needs at least one sample");

  Vec sorted(dt_samples.begin(), dt_samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  TimeLut lut;
  for (std::size_t i = 1; i < k; ++i) {
    // upper edge of interval i-1: the sample at rank ceil(i*n/K)
    std::size_t rank = (i * n + k - 1) / k;
    rank = std::clamp<std::size_t>(rank, 1, n);
    const double b = sorted[rank - 1];
    if (lut.boundaries.empty() || b > lut.boundaries.back()) lut.boundaries.push_back(b);
  }

  const std::size_t intervals = lut.boundaries.size() + 1;
  Vec sums(intervals, 0.0);
  std::vector<std::size_t> counts(intervals, 0);
  for (double s : sorted) {
    const std::size_t idx = lut.lookup(s);
    sums[idx] += s;
    ++counts[idx];
  }
  lut.entries.reserve(intervals);
  for (std::size_t i = 0; i < intervals; ++i) {
    double rep;
    if (counts[i] > 0) {
      rep = sums[i] / static_cast<double>(counts[i]);
    } else {
      // only the unbounded last interval can be empty
      const double lo = i == 0 ? 0.0 : lut.boundaries[i - 1];
      const double hi = i < lut.boundaries.size() ? lut.boundaries[i] : lo;
      rep = 0.5 * (lo + hi);
    }
    lut.entries.push_back(encoder.encode(rep));
  }
  return lut;
}

TimeLut fuse_weights(const TimeLut& lut, const std::string& consumer, const Matrix& weight_block) {
  const std::size_t d_time = lut.entries.empty() ? 0 : lut.entries.front().size();
  if (weight_block.cols() != d_time) {
    throw ConfigError("fuse_weights('" + consumer + "'): weight block has " +
                      std::to_string(weight_block.cols()) + " columns, LUT entries have " +
                      std::to_string(d_time));
  }
  TimeLut out = lut;
  std::vector<Vec> products;
  products.reserve(lut.entries.size());
  for (const Vec& entry : lut.entries) {
    Vec p(weight_block.rows());
    matvec_cols(weight_block, 0, entry, p, nullptr);
    products.push_back(std::move(p));
  }
  out.fused_products[consumer] = std::move(products);
  return out;
}

std::vector<std::size_t> interval_counts(const TimeLut& lut, std::span<const double> dt_samples) {
  std::vector<std::size_t> counts(lut.boundaries.size() + 1, 0);
  for (double s : dt_samples) ++counts[lut.lookup(s)];
  return counts;
}

}  // namespace tgnn

namespace tgnn {

std::size_t TimePath::dim() const {
  if (lut_ != nullptr) return lut_->entries.empty() ? 0 : lut_->entries.front().size();
  return cosine_->dim();
}

Vec TimePath::encode(double dt) const {
  if (lut_ != nullptr) return lut_->entries.at(lut_->lookup(dt));
  return cosine_->encode(dt);
}

void TimePath::contribution(const Matrix& w, std::size_t offset, double dt,
                            const std::string& consumer, std::span<double> out,
                            OpCounter* ops) const {
  if (observer_ != nullptr && *observer_) (*observer_)(dt);
  if (lut_ != nullptr) {
    const Vec& product = lut_->fused(consumer).at(lut_->lookup(dt));
    if (product.size() != out.size()) {
      throw ConfigError("fused product for '" + consumer + "' has the wrong length");
    }
    std::copy(product.begin(), product.end(), out.begin());
    return;
  }
  const Vec phi = cosine_->encode(dt);
  matvec_cols(w, offset, phi, out, ops);
}

}  // namespace tgnn
