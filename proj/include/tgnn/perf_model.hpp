#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace tgnn::perf {

// Effective-bandwidth factor alpha(l) in (0, 1] for a burst of l elements.
// Default: min(1, l * Z_d / 64), i.e. full efficiency from 64-byte bursts.
// A user table of (burst length, alpha) points is interpolated linearly and
// clamped at both ends.
class BandwidthCurve {
 public:
  BandwidthCurve() = default;
  explicit BandwidthCurve(std::vector<std::pair<double, double>> points);

  double operator()(double burst_elements, double bytes_per_element) const;
  bool is_default() const { return points_.empty(); }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

struct PerfConfig {
  double f_feat = 0;
  double f_mail = 0;
  double f_mem = 0;
  double mr = 0;
  double f_emb = 0;
  double z_d = 4;          // bytes per element
  double n_cu = 1;
  double s_g = 1;          // gate array side, S_g x S_g MACs per cycle
  double s_fam = 1;
  double s_ftm = 1;
  double n_b = 1;          // processing batch size
  double f_freq = 1e8;     // Hz
  double bw = 1e9;         // peak bytes per second
  BandwidthCurve alpha;
  double beta = 9;         // pipeline stages
  // Divide the compute terms by n_cu. Off by default: the dominant-term
  // formula leaves them undivided.
  bool divide_compute_by_cu = false;

  // Throws ConfigError on non-positive values.
  void validate() const;
};

struct PerfEstimate {
  double t_comp_max = 0;
  double t_ls = 0;
  double t_p = 0;
  double max_throughput = 0;  // edges per second
  double latency = 0;         // seconds for a batch of total_batch_N edges
};

double t_comp_max(const PerfConfig& cfg);
double t_ls(const PerfConfig& cfg);
PerfEstimate estimate(const PerfConfig& cfg, std::uint64_t total_batch_n);

// Hardware presets for two boards. Model dimensions are left zero.
PerfConfig u200_preset();
PerfConfig zcu104_preset();

}  // namespace tgnn::perf
