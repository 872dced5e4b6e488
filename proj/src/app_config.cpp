#include "tgnn/app_config.hpp"

#include <set>
#include <string>

#include "tgnn/weights_io.hpp"

namespace tgnn {

using nlohmann::json;

namespace {

class Keys {
 public:
  explicit Keys(const json& doc) : doc_(doc) {
    if (!doc_.is_object()) throw ConfigError("config must be a JSON object");
  }

  bool has(const char* key) const { return doc_.contains(key); }
  void mark(const char* key) { seen_.insert(key); }

  template <class T>
  T get(const char* key, T fallback) {
    seen_.insert(key);
    if (!doc_.contains(key)) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T require(const char* key) {
    seen_.insert(key);
    if (!doc_.contains(key)) throw ConfigError(std::string("missing config key '") + key + "'");
    return convert<T>(key);
  }

  void reject_unknown() const {
    for (const auto& [k, _] : doc_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

 private:
  template <class T>
  T convert(const char* key) const {
    const json& v = doc_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(std::string("config key '") + key + "' must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
  }

  const json& doc_;
  std::set<std::string> seen_;
};

}  // namespace

void sync_perf_dims(AppConfig& cfg) {
  const EngineConfig& e = cfg.engine;
  cfg.perf.f_mem = static_cast<double>(e.d_mem);
  cfg.perf.f_mail = static_cast<double>(2 * e.d_mem + e.d_edge + e.d_time);
  cfg.perf.f_feat = static_cast<double>(e.d_edge + e.d_feat);
  cfg.perf.f_emb = static_cast<double>(e.d_emb);
  cfg.perf.mr = static_cast<double>(e.mr);
  const PerfDimOverrides& o = cfg.perf_dims;
  if (o.f_mem) cfg.perf.f_mem = *o.f_mem;
  if (o.f_mail) cfg.perf.f_mail = *o.f_mail;
  if (o.f_feat) cfg.perf.f_feat = *o.f_feat;
  if (o.f_emb) cfg.perf.f_emb = *o.f_emb;
  if (o.mr) cfg.perf.mr = *o.mr;
}

AppConfig app_config_from_json(const json& doc) {
  Keys k(doc);
  AppConfig cfg;
  EngineConfig& e = cfg.engine;
  e.d_mem = k.require<std::size_t>("d_mem");
  e.d_edge = k.require<std::size_t>("d_edge");
  e.d_time = k.require<std::size_t>("d_time");
  e.d_emb = k.require<std::size_t>("d_emb");
  e.d_feat = k.get<std::size_t>("d_feat", 0);
  e.mr = k.get<std::size_t>("mr", 10);
  e.n = k.get<std::size_t>("n", 10);
  e.budget = k.get<std::size_t>("budget", 10);
  try {
    e.variant = parse_variant(k.get<std::string>("variant", "baseline"));
  } catch (const Error& err) {
    throw ConfigError(std::string("config key 'variant': ") + err.what());
  }
  if (k.has("batch_size") && k.has("batch_window")) {
    throw ConfigError("config keys 'batch_size' and 'batch_window' are exclusive");
  }
  if (k.has("batch_window")) {
    e.batch = BatchPolicy::fixed_window(k.get<double>("batch_window", 900.0));
  } else {
    e.batch = BatchPolicy::fixed_count(k.get<std::size_t>("batch_size", 200));
  }
  e.n_cu = k.get<std::size_t>("n_cu", 1);
  e.updater_enabled = k.get<bool>("updater", true);
  e.updater_lines = k.get<std::size_t>("updater_lines", 64);
  e.scan_width = k.get<std::size_t>("scan_width", 3);
  e.threads = k.get<std::size_t>("threads", 1);
  const std::string precision = k.get<std::string>("precision", "f64");
  if (precision == "f64") {
    e.precision = Precision::f64;
  } else if (precision == "f32") {
    e.precision = Precision::f32;
  } else {
    throw ConfigError("config key 'precision' must be \"f64\" or \"f32\"");
  }
  cfg.lut_size = k.get<std::size_t>("lut_size", kDefaultLutSize);

  const std::string board = k.get<std::string>("board", "");
  perf::PerfConfig& p = cfg.perf;
  if (board == "u200") {
    p = perf::u200_preset();
  } else if (board == "zcu104") {
    p = perf::zcu104_preset();
  } else if (!board.empty()) {
    throw ConfigError("config key 'board' must be \"u200\" or \"zcu104\"");
  }
  // a board preset brings its CU count unless n_cu is given
  if (!board.empty() && !k.has("n_cu")) e.n_cu = static_cast<std::size_t>(p.n_cu);
  p.n_cu = static_cast<double>(e.n_cu);
  p.z_d = k.get<double>("z_d", p.z_d);
  p.s_g = k.get<double>("s_g", p.s_g);
  p.s_fam = k.get<double>("s_fam", p.s_fam);
  p.s_ftm = k.get<double>("s_ftm", p.s_ftm);
  p.n_b = k.get<double>("n_b", p.n_b);
  p.f_freq = k.get<double>("f_freq", p.f_freq);
  p.bw = k.get<double>("bw", p.bw);
  p.beta = k.get<double>("beta", p.beta);
  p.divide_compute_by_cu = k.get<bool>("divide_compute_by_cu", p.divide_compute_by_cu);
  if (k.has("alpha_table")) {
    try {
      auto table = doc.at("alpha_table").get<std::vector<std::pair<double, double>>>();
      if (!table.empty()) p.alpha = perf::BandwidthCurve(std::move(table));
    } catch (const json::exception&) {
      throw ConfigError("config key 'alpha_table' must be a list of [length, alpha] pairs");
    } catch (const Error& err) {
      throw ConfigError(std::string("config key 'alpha_table': ") + err.what());
    }
  }
  k.mark("alpha_table");
  auto dim_override = [&](const char* key) -> std::optional<double> {
    if (!k.has(key)) {
      k.mark(key);
      return std::nullopt;
    }
    return k.get<double>(key, 0.0);
  };
  cfg.perf_dims.f_mem = dim_override("perf_f_mem");
  cfg.perf_dims.f_mail = dim_override("perf_f_mail");
  cfg.perf_dims.f_feat = dim_override("perf_f_feat");
  cfg.perf_dims.f_emb = dim_override("perf_f_emb");
  cfg.perf_dims.mr = dim_override("perf_mr");

  cfg.kd_temperature = k.get<double>("kd_temperature", 1.0);
  cfg.kd_learning_rate = k.get<double>("kd_learning_rate", 0.5);
  cfg.kd_steps = k.get<std::size_t>("kd_steps", 200);
  const std::string loss = k.get<std::string>("kd_loss", "dot");
  if (loss == "dot") {
    cfg.kd_loss = DistillLoss::dot;
  } else if (loss == "cross_entropy") {
    cfg.kd_loss = DistillLoss::cross_entropy;
  } else {
    throw ConfigError("config key 'kd_loss' must be \"dot\" or \"cross_entropy\"");
  }
  k.reject_unknown();

  sync_perf_dims(cfg);
  e.validate();
  return cfg;
}

AppConfig load_app_config(const std::filesystem::path& path) {
  return app_config_from_json(read_json_file(path));
}

}  // namespace tgnn
