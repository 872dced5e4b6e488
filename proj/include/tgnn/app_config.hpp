#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "tgnn/config.hpp"
#include "tgnn/distill.hpp"
#include "tgnn/perf_model.hpp"

namespace tgnn {

// Everything a run needs besides weights and data, read from one flat JSON
// object. Required keys: d_mem, d_edge, d_time, d_emb. Optional keys and
// their defaults:
//   d_feat 0, mr 10, n 10, budget 10, variant "baseline",
//   batch_size 200 | batch_window (seconds; excludes batch_size),
//   n_cu 1, updater true, updater_lines 64, scan_width 3, threads 1,
//   precision "f64", lut_size 128,
//   z_d 4, s_g 1, s_fam 1, s_ftm 1, n_b 1, f_freq 1e8, bw 1e9, beta 9,
//   alpha_table [] (list of [burst_elements, alpha]), divide_compute_by_cu false,
//   board "" ("u200" or "zcu104" seeds the hardware keys and n_cu from a preset),
//   kd_temperature 1, kd_learning_rate 0.5, kd_steps 200, kd_loss "dot".
// The perf model's vector lengths follow the model dims:
//   f_mem = d_mem, f_mail = 2 d_mem + d_edge + d_time, f_feat = d_edge + d_feat,
//   f_emb = d_emb, mr = mr,
// unless perf_f_mem, perf_f_mail, perf_f_feat, perf_f_emb or perf_mr set them.
struct PerfDimOverrides {
  std::optional<double> f_mem, f_mail, f_feat, f_emb, mr;
};

struct AppConfig {
  EngineConfig engine;
  perf::PerfConfig perf;
  PerfDimOverrides perf_dims;
  std::size_t lut_size = 128;
  double kd_temperature = 1.0;
  double kd_learning_rate = 0.5;
  std::size_t kd_steps = 200;
  DistillLoss kd_loss = DistillLoss::dot;
};

// Throws ConfigError naming the offending key.
AppConfig app_config_from_json(const nlohmann::json& doc);
AppConfig load_app_config(const std::filesystem::path& path);

// Refreshes the perf model's vector lengths from the engine dims and overrides.
void sync_perf_dims(AppConfig& cfg);

}  // namespace tgnn
