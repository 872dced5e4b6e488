#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgnn/config.hpp"

namespace tgnn {

enum class Stage : std::size_t { sample = 0, memory = 1, gnn = 2, update = 3 };
inline constexpr std::size_t kStageCount = 4;
const char* to_string(Stage s);

struct StageCount {
  std::uint64_t mac = 0;
  std::uint64_t mem = 0;  // element-granularity external accesses, weights excluded

  bool operator==(const StageCount&) const = default;
};

struct CounterReport {
  std::array<StageCount, kStageCount> stages{};

  StageCount& operator[](Stage s) { return stages[static_cast<std::size_t>(s)]; }
  const StageCount& operator[](Stage s) const { return stages[static_cast<std::size_t>(s)]; }
  StageCount total() const;
  CounterReport& operator+=(const CounterReport& other);
  bool operator==(const CounterReport&) const = default;
};

// What one dynamic node embedding actually touched.
struct EmbeddingShape {
  bool has_message = true;   // cached message present, GRU runs
  std::size_t valid = 0;     // unmasked neighbor slots
  std::size_t kept = 0;      // slots whose values are computed
  std::size_t appends = 1;   // neighbor-table appends for this vertex in the batch
};

// Steady-state shape: message present, all n slots filled, one append.
EmbeddingShape steady_state_shape(const EngineConfig& config);

// Closed-form MAC/MEM of one dynamic node embedding.
CounterReport count_ops(const EngineConfig& config, const EmbeddingShape& shape);
CounterReport count_ops(const EngineConfig& config);

// cost(k) = fixed + k * per_neighbor
struct AffineCost {
  double fixed = 0.0;
  double per_neighbor = 0.0;
  double at(double k) const { return fixed + k * per_neighbor; }
};

struct AffineFit {
  AffineCost cost;
  double max_abs_residual = 0.0;
};

// Least-squares line through (k_i, y_i); needs at least two distinct k.
AffineFit fit_affine(std::span<const double> k, std::span<const double> y);

// Steady-state GNN-stage MACs and total MEM as affine functions of the number
// of kept neighbors, for the config's variant.
AffineCost gnn_mac_cost(const EngineConfig& config);
AffineCost total_mem_cost(const EngineConfig& config);

// Replacement constants for the complexity table, in raw counts.
struct CostCalibration {
  std::optional<AffineCost> gnn_mac;    // applied to the LUT rows (sat+lut, sat+lut+np)
  std::optional<AffineCost> total_mem;  // applied to every row
};

// One row of a per-embedding complexity table. k-units are shown with one
// decimal and the percentages are taken between the shown values.
struct ComplexityRow {
  std::string label;
  Variant variant = Variant::baseline;
  std::size_t neighbors = 0;
  double kmem = 0.0;
  double kmac_gru = 0.0;
  double kmac_gnn = 0.0;
  double kmac_total = 0.0;
  double mem_percent = 0.0;
  double mac_percent = 0.0;
  // unrounded ratios against the baseline
  double mem_ratio_exact = 0.0;
  double mac_ratio_exact = 0.0;
};

// Rows: Baseline, +SAT, +LUT, then +NP(k) for each budget.
std::vector<ComplexityRow> complexity_table(const EngineConfig& config,
                                            std::span<const std::size_t> np_budgets,
                                            const CostCalibration& calibration = {});

// Rounds a raw count to thousands with one decimal (half away from zero).
double to_k_display(double count);

}  // namespace tgnn
