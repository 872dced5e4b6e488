#include "tgnn/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgnn/types.hpp"

namespace tgnn::perf {

BandwidthCurve::BandwidthCurve(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  for (const auto& [l, a] : points_) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha table values must lie in (0, 1]");
    if (l < 0.0) throw ConfigError("alpha table burst lengths must be non-negative");
  }
}

double BandwidthCurve::operator()(double l, double z_d) const {
  if (points_.empty()) return std::clamp(l * z_d / 64.0, 1e-12, 1.0);
  if (l <= points_.front().first) return points_.front().second;
  if (l >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), l,
                             [](double x, const auto& p) { return x < p.first; });
  auto lo = hi - 1;
  const double t = (l - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

void PerfConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("perf config: ") + name + " must be positive");
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string("perf config: ") + name + " must be >= 0");
  };
  non_negative(f_feat, "f_feat");
  non_negative(f_mail, "f_mail");
  non_negative(f_mem, "f_mem");
  non_negative(mr, "mr");
  non_negative(f_emb, "f_emb");
  positive(z_d, "Z_d");
  positive(n_cu, "N_cu");
  positive(s_g, "S_g");
  positive(s_fam, "S_FAM");
  positive(s_ftm, "S_FTM");
  positive(n_b, "N_b");
  positive(f_freq, "F_freq");
  positive(bw, "BW");
  positive(beta, "beta");
}

double t_comp_max(const PerfConfig& c) {
  const double gates = 3.0 * c.n_b * c.f_mail * c.f_mem / (c.s_g * c.s_g);
  const double fam = 3.0 * c.n_b * c.mr * (c.f_mem + c.f_feat) / c.s_fam;
  const double ftm = 3.0 * c.n_b * (c.f_mem + c.f_feat) * c.f_emb / c.s_ftm;
  double cycles = std::max({gates, fam, ftm});
  if (c.divide_compute_by_cu) cycles /= c.n_cu;
  return cycles / c.f_freq;
}

double t_ls(const PerfConfig& c) {
  auto transfer = [&](double count, double len) {
    if (count == 0.0) return 0.0;
    return count * c.z_d / (c.alpha(len, c.z_d) * c.bw);
  };
  return transfer(6.0 * c.n_b * c.f_mail, c.f_mail) +
         transfer(3.0 * c.n_b * (2.0 + c.mr) * c.f_mem, c.f_mem) +
         transfer(3.0 * c.n_b * c.mr * c.f_feat, c.f_feat) +
         transfer(3.0 * c.n_b * c.f_emb, c.f_emb);
}

PerfEstimate estimate(const PerfConfig& cfg, std::uint64_t total_batch_n) {
  cfg.validate();
  if (total_batch_n == 0) throw PreconditionError("estimate needs a batch of at least one edge");
  PerfEstimate e;
  e.t_comp_max = t_comp_max(cfg);
  e.t_ls = t_ls(cfg);
  e.t_p = std::max(e.t_comp_max, e.t_ls);
  e.max_throughput = cfg.n_b / e.t_p;
  const double fills = std::ceil(static_cast<double>(total_batch_n) / cfg.n_b);
  e.latency = (cfg.beta - 1.0 + fills) * e.t_p;
  return e;
}

PerfConfig u200_preset() {
  PerfConfig c;
  c.n_cu = 2;
  c.s_g = 8;
  c.s_fam = 16;
  c.s_ftm = 64;
  c.f_freq = 250e6;
  c.bw = 77e9;
  return c;
}

PerfConfig zcu104_preset() {
  PerfConfig c;
  c.n_cu = 1;
  c.s_g = 4;
  c.s_fam = 8;
  c.s_ftm = 16;
  c.f_freq = 125e6;
  c.bw = 19.2e9;
  return c;
}

}  // namespace tgnn::perf
