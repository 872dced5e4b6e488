#include "tgnn/counters.hpp"

#include <algorithm>
#include <cmath>

#include "tgnn/memory_update.hpp"

namespace tgnn {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::sample: return "sample";
    case Stage::memory: return "memory";
    case Stage::gnn: return "GNN";
    case Stage::update: return "update";
  }
  return "?";
}

StageCount CounterReport::total() const {
  StageCount t;
  for (const auto& s : stages) {
    t.mac += s.mac;
    t.mem += s.mem;
  }
  return t;
}

CounterReport& CounterReport::operator+=(const CounterReport& other) {
  for (std::size_t i = 0; i < kStageCount; ++i) {
    stages[i].mac += other.stages[i].mac;
    stages[i].mem += other.stages[i].mem;
  }
  return *this;
}

EmbeddingShape steady_state_shape(const EngineConfig& config) {
  return EmbeddingShape{true, config.n, config.kept_slots(), 1};
}

CounterReport count_ops(const EngineConfig& c, const EmbeddingShape& shape) {
  const std::uint64_t D = c.d_mem, E = c.d_edge, F = c.d_feat, T = c.d_time, O = c.d_emb;
  const std::uint64_t R = 2 * D + E;
  const std::uint64_t valid = shape.valid;
  const std::uint64_t kept = shape.kept;
  const bool lut = uses_lut(c.variant);

  CounterReport r;
  r[Stage::sample].mem = 3 * valid;

  r[Stage::memory].mem = (shape.has_message ? R + 1 : 0) + D + F + kept * (D + F + E);
  r[Stage::memory].mac = shape.has_message ? gru_macs(c.d_mem, c.d_edge, c.d_time, lut) : 0;

  std::uint64_t gnn = D * F;  // f' of the vertex itself
  if (c.variant == Variant::baseline) {
    const std::uint64_t proj = O * (D + E + T);
    if (valid > 0) {
      gnn += O * (D + T) + valid * (D * F + 2 * proj + O + 1 + O);
    } else {
      gnn += proj;
    }
  } else {
    const std::uint64_t value = O * (D + E) + (lut ? 0 : O * T);
    const std::uint64_t slots = c.n;
    if (valid > 0) {
      gnn += slots * slots + kept * (D * F + value + O);
    } else {
      gnn += value;
    }
    gnn += O * (O + D);
  }
  r[Stage::gnn].mac = gnn;

  r[Stage::update].mem = (shape.has_message ? D + 1 : 0) + (R + 1) + 3 * shape.appends;
  return r;
}

CounterReport count_ops(const EngineConfig& config) {
  return count_ops(config, steady_state_shape(config));
}

AffineFit fit_affine(std::span<const double> k, std::span<const double> y) {
  if (k.size() != y.size() || k.size() < 2) {
    throw PreconditionError("affine fit needs at least two (k, y) pairs");
  }
  const double m = static_cast<double>(k.size());
  double mk = 0, my = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    mk += k[i];
    my += y[i];
  }
  mk /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    sxx += (k[i] - mk) * (k[i] - mk);
    sxy += (k[i] - mk) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("affine fit needs two distinct k values");
  AffineFit fit;
  fit.cost.per_neighbor = sxy / sxx;
  fit.cost.fixed = my - fit.cost.per_neighbor * mk;
  for (std::size_t i = 0; i < k.size(); ++i) {
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(y[i] - fit.cost.at(k[i])));
  }
  return fit;
}

namespace {

EngineConfig with_kept(EngineConfig c, std::size_t k) {
  if (prunes_neighbors(c.variant)) {
    c.budget = k;
  } else {
    c.n = k;
    c.budget = std::min(c.budget, k);
  }
  return c;
}

}  // namespace

AffineCost gnn_mac_cost(const EngineConfig& c) {
  const std::uint64_t D = c.d_mem, E = c.d_edge, F = c.d_feat, T = c.d_time, O = c.d_emb;
  if (c.variant == Variant::baseline) {
    // every slot is kept; q is the only per-embedding term
    return {static_cast<double>(D * F + O * (D + T)),
            static_cast<double>(D * F + 2 * O * (D + E + T) + 2 * O + 1)};
  }
  const std::uint64_t value = O * (D + E) + (uses_lut(c.variant) ? 0 : O * T);
  return {static_cast<double>(D * F + c.n * c.n + O * (O + D)),
          static_cast<double>(D * F + value + O)};
}

AffineCost total_mem_cost(const EngineConfig& c) {
  const EngineConfig one = with_kept(c, 1);
  const EngineConfig two = with_kept(c, 2);
  auto mem = [](const EngineConfig& cfg) {
    EmbeddingShape s = steady_state_shape(cfg);
    return static_cast<double>(count_ops(cfg, s).total().mem);
  };
  const double per = mem(two) - mem(one);
  return {mem(one) - per, per};
}

double to_k_display(double count) { return std::round(count / 100.0) / 10.0; }

std::vector<ComplexityRow> complexity_table(const EngineConfig& config,
                                            std::span<const std::size_t> np_budgets,
                                            const CostCalibration& calibration) {
  struct Spec {
    std::string label;
    Variant variant;
    std::size_t kept;
  };
  std::vector<Spec> specs{{"Baseline", Variant::baseline, config.n},
                          {"+SAT", Variant::sat, config.n},
                          {"+LUT", Variant::sat_lut, config.n}};
  for (std::size_t k : np_budgets) {
    if (k == 0 || k > config.n) {
      throw ConfigError("pruning budget " + std::to_string(k) + " outside [1, n = " +
                        std::to_string(config.n) + "]");
    }
    specs.push_back({"+NP(" + std::to_string(k) + ")", Variant::sat_lut_np, k});
  }

  std::vector<ComplexityRow> rows;
  for (const Spec& s : specs) {
    EngineConfig c = config;
    c.variant = s.variant;
    c.budget = s.variant == Variant::sat_lut_np ? s.kept : c.n;
    const CounterReport ops = count_ops(c);

    double mem = static_cast<double>(ops.total().mem);
    double gru = static_cast<double>(ops[Stage::memory].mac);
    double gnn = static_cast<double>(ops[Stage::gnn].mac);
    if (calibration.total_mem) mem = calibration.total_mem->at(static_cast<double>(s.kept));
    if (calibration.gnn_mac && uses_lut(s.variant)) {
      gnn = calibration.gnn_mac->at(static_cast<double>(s.kept));
    }
    ComplexityRow row;
    row.label = s.label;
    row.variant = s.variant;
    row.neighbors = s.kept;
    row.kmem = to_k_display(mem);
    row.kmac_gru = to_k_display(gru);
    row.kmac_gnn = to_k_display(gnn);
    row.kmac_total = to_k_display(gru + gnn);
    row.mem_ratio_exact = mem;
    row.mac_ratio_exact = gru + gnn;
    rows.push_back(row);
  }
  const ComplexityRow base = rows.front();
  for (ComplexityRow& row : rows) {
    row.mem_percent = base.kmem > 0 ? 100.0 * row.kmem / base.kmem : 0.0;
    row.mac_percent = base.kmac_total > 0 ? 100.0 * row.kmac_total / base.kmac_total : 0.0;
    row.mem_ratio_exact = base.mem_ratio_exact > 0 ? row.mem_ratio_exact / base.mem_ratio_exact : 0.0;
    row.mac_ratio_exact = base.mac_ratio_exact > 0 ? row.mac_ratio_exact / base.mac_ratio_exact : 0.0;
  }
  return rows;
}

}  // namespace tgnn
