#include "tgnn/linalg.hpp"

#include <string>

namespace tgnn {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ConfigError("matrix data has " + std::to_string(data_.size()) +
                      " elements, expected " + std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column_block(std::size_t offset, std::size_t width) const {
  if (offset + width > cols_) throw ConfigError("column block out of range");
  Matrix out(rows_, width);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < width; ++c) out(r, c) = (*this)(r, offset + c);
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_cols(const Matrix& w, std::size_t offset, std::span<const double> x,
                 std::span<double> out, OpCounter* ops) {
  if (offset + x.size() > w.cols() || out.size() != w.rows()) {
    throw ConfigError("matvec shape mismatch: matrix " + std::to_string(w.rows()) + "x" +
                      std::to_string(w.cols()) + ", block at " + std::to_string(offset) +
                      " of width " + std::to_string(x.size()));
  }
  for (std::size_t r = 0; r < w.rows(); ++r) {
    out[r] = dot(w.row(r).subspan(offset, x.size()), x);
  }
  count_macs(ops, static_cast<std::uint64_t>(w.rows()) * x.size());
}

Vec matvec(const Matrix& w, std::span<const double> x, OpCounter* ops) {
  if (x.size() != w.cols()) throw ConfigError("matvec: vector length does not match columns");
  Vec out(w.rows());
  matvec_cols(w, 0, x, out, ops);
  return out;
}

void add_inplace(std::span<double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

Vec concat(std::initializer_list<std::span<const double>> parts) {
  Vec out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace tgnn
