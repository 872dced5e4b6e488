#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tgnn/types.hpp"

namespace tgnn {

// Multiply-accumulate tally. Kernels add to it when a non-null pointer is
// passed; transcendental evaluations (cos, exp, sigmoid, tanh) are not MACs.
struct OpCounter {
  std::uint64_t mac = 0;
  void add(std::uint64_t n) { mac += n; }
};

inline void count_macs(OpCounter* ops, std::uint64_t n) {
  if (ops != nullptr) ops->add(n);
}

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Copy of columns [offset, offset + width).
  Matrix column_block(std::size_t offset, std::size_t width) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Plain left-to-right dot product. Every path that must agree bit-for-bit
// (cosine vs. fused LUT) goes through this single loop.
double dot(std::span<const double> a, std::span<const double> b);

// out[r] = W[r, offset : offset + x.size()] . x
// Counts rows * x.size() MACs.
void matvec_cols(const Matrix& w, std::size_t offset, std::span<const double> x,
                 std::span<double> out, OpCounter* ops);

Vec matvec(const Matrix& w, std::span<const double> x, OpCounter* ops);

// Elementwise a += b.
void add_inplace(std::span<double> a, std::span<const double> b);

Vec concat(std::initializer_list<std::span<const double>> parts);

}  // namespace tgnn
