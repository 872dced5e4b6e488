#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tgnn/types.hpp"

namespace tgnn {

struct StreamStats {
  std::size_t row_count = 0;
  std::size_t vertex_count = 0;
  std::size_t d_edge = 0;
  Timestamp t_min = 0.0;
  Timestamp t_max = 0.0;
};

struct EdgeStream {
  std::vector<TemporalEdge> edges;  // edge_id = 0-based row index
  std::vector<int> labels;          // state_label per row
  StreamStats stats;
  // Time differences a mailbox would see: for every edge endpoint with an
  // earlier interaction, t_edge - t_previous.
  std::vector<double> dt_samples;
};

// JODIE layout: a header line, then "src,dst,timestamp,state_label,f_1,...".
// Throws ParseError carrying the 1-based file line of the offending row for
// bad numbers, decreasing timestamps and arity changes. `d_edge`, when set,
// fixes the expected feature count.
EdgeStream read_edge_csv(std::istream& in, std::optional<std::size_t> d_edge = std::nullopt);
EdgeStream read_edge_csv(const std::filesystem::path& path,
                         std::optional<std::size_t> d_edge = std::nullopt);

void write_edge_csv(std::ostream& out, const std::vector<TemporalEdge>& edges,
                    const std::vector<int>& labels = {});

std::vector<double> dt_profile(const std::vector<TemporalEdge>& edges);
StreamStats stream_stats(const std::vector<TemporalEdge>& edges);

struct SyntheticSpec {
  std::size_t edges = 1000;
  std::size_t vertices = 200;
  std::size_t d_edge = 4;
  double mean_gap = 1.0;  // mean inter-arrival time in seconds
  std::uint64_t seed = 1;
};

// Chronological stream with skewed endpoint popularity and bursty gaps (most
// gaps short, a few long), deterministic in the seed.
std::vector<TemporalEdge> synthetic_stream(const SyntheticSpec& spec);

}  // namespace tgnn
