#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tgnn {

using VertexId = std::uint64_t;
using EdgeId = std::uint64_t;
using Timestamp = double;
using Vec = std::vector<double>;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes, dimensions or option values that do not agree with each other.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. negative time difference).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Input edges or state writes that are not in chronological order.
class StreamOrderError : public Error {
 public:
  using Error::Error;
};

// Softmax over a set in which every slot is masked.
class EmptyAttentionError : public Error {
 public:
  using Error::Error;
};

// Weights / config documents missing required arrays or keys.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed input files; carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TemporalEdge {
  EdgeId edge_id = 0;
  VertexId src = 0;
  VertexId dst = 0;
  Timestamp timestamp = 0.0;
  Vec features;

  bool operator==(const TemporalEdge&) const = default;
};

}  // namespace tgnn
