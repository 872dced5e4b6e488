// tgnn: command-line front end for the streaming inference engine.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "tgnn/app_config.hpp"
#include "tgnn/dataset.hpp"
#include "tgnn/engine.hpp"
#include "tgnn/report.hpp"
#include "tgnn/weights_io.hpp"

namespace fs = std::filesystem;
using namespace tgnn;

namespace {

struct Common {
  std::string config;
  std::string weights;
  std::string data;
  std::string variant;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> batch;
  std::optional<double> window;
  std::optional<std::size_t> threads;
  std::string updater;
  std::uint64_t seed = 1;
};

void add_engine_flags(CLI::App* cmd, Common& c, bool need_weights) {
  cmd->add_option("--config", c.config, "Config JSON")->required()->check(CLI::ExistingFile);
  auto* w = cmd->add_option("--weights", c.weights, "Weights JSON")->check(CLI::ExistingFile);
  if (need_weights) w->required();
  cmd->add_option("--data", c.data, "Edge stream CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--variant", c.variant, "baseline | sat | sat+lut | sat+lut+np");
  cmd->add_option("--budget", c.budget, "Pruning budget k");
  auto* b = cmd->add_option("--batch", c.batch, "Fixed-count batches of N edges");
  auto* win = cmd->add_option("--window", c.window, "Fixed-window batches, seconds");
  b->excludes(win);
  cmd->add_option("--threads", c.threads, "Intra-batch worker threads");
  cmd->add_option("--updater", c.updater, "on | off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--seed", c.seed, "Seed for generated weights");
}

AppConfig resolve_config(const Common& c) {
  AppConfig cfg = load_app_config(c.config);
  EngineConfig& e = cfg.engine;
  if (!c.variant.empty()) e.variant = parse_variant(c.variant);
  if (c.budget) e.budget = *c.budget;
  if (c.batch) e.batch = BatchPolicy::fixed_count(*c.batch);
  if (c.window) e.batch = BatchPolicy::fixed_window(*c.window);
  if (c.threads) e.threads = *c.threads;
  if (!c.updater.empty()) e.updater_enabled = c.updater == "on";
  e.validate();
  sync_perf_dims(cfg);
  return cfg;
}

// Weights for the configured variant: loaded or seeded, with a LUT built from
// the stream's dt profile when the variant needs one and the file has none.
ModelParams resolve_weights(const Common& c, const AppConfig& cfg, const EdgeStream& stream) {
  ModelParams params =
      c.weights.empty() ? random_params(cfg.engine, c.seed) : load_weights(c.weights);
  if (uses_lut(cfg.engine.variant) && !params.lut) {
    // without revisits the only encoded dt is the self node's 0
    const std::vector<double> samples =
        stream.dt_samples.empty() ? std::vector<double>{0.0} : stream.dt_samples;
    params.lut = fuse_all(build_lut(samples, cfg.lut_size, params.encoder), params, cfg.engine);
  }
  params.validate(cfg.engine);
  return params;
}

EdgeStream load_stream(const Common& c, const AppConfig& cfg) {
  return read_edge_csv(fs::path(c.data), cfg.engine.d_edge);
}

int cmd_infer(const Common& c, const std::string& out_dir, const std::string& trace_path,
              const std::string& clock, const std::string& format, const std::string& state) {
  const AppConfig cfg = resolve_config(c);
  const EdgeStream stream = load_stream(c, cfg);
  const ModelParams params = resolve_weights(c, cfg, stream);

  fs::create_directories(out_dir);
  const EmbeddingFormat fmt = parse_embedding_format(format);
  std::ofstream emb_file(fs::path(out_dir) / ("embeddings." + format), std::ios::binary);
  if (!emb_file) throw Error("cannot write embeddings to " + out_dir);
  EmbeddingWriter writer(emb_file, fmt, cfg.engine.d_emb);

  Engine engine(cfg.engine, params);
  std::ofstream trace_file;
  if (!trace_path.empty()) {
    trace_file.open(trace_path, std::ios::binary);
    if (!trace_file) throw Error("cannot write trace " + trace_path);
    engine.set_trace_sink([&](const TraceEvent& e) { trace_file << format_trace_event(e) << '\n'; });
  }

  RunOptions opts;
  opts.timing = clock == "model" ? Timing::model : Timing::wall;
  if (opts.timing == Timing::model) opts.perf = cfg.perf;
  opts.on_embedding = [&](const EmbeddingRecord& r) { writer.write(r); };
  const RunResult run = run_stream(engine, stream.edges, opts);

  std::optional<perf::PerfEstimate> est;
  if (run.metrics.batches > 0) {
    cfg.perf.validate();
    const auto mean_batch = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(run.metrics.edges_processed) /
                     static_cast<double>(run.metrics.batches)));
    est = perf::estimate(cfg.perf, std::max<std::uint64_t>(1, mean_batch));
  }
  write_text_file(fs::path(out_dir) / "report.json",
                  run_report(cfg.engine, run, est).dump(2) + "\n");
  write_text_file(fs::path(out_dir) / "counters.txt", counter_table(run.counters, "counters"));
  if (!state.empty()) write_text_file(state, snapshot_to_json(engine.store()).dump(1) + "\n");

  std::printf("edges %llu  batches %zu  embeddings %llu  throughput %.0f E/s\n",
              static_cast<unsigned long long>(run.metrics.edges_processed), run.metrics.batches,
              static_cast<unsigned long long>(writer.records()), run.metrics.throughput_eps);
  return 0;
}

int cmd_perf(const std::string& config, const std::string& board, std::uint64_t total_n,
             bool as_json) {
  AppConfig cfg = load_app_config(config);
  if (board == "u200" || board == "zcu104") {
    const perf::PerfConfig preset = board == "u200" ? perf::u200_preset() : perf::zcu104_preset();
    perf::PerfConfig& p = cfg.perf;
    p.n_cu = preset.n_cu;
    p.s_g = preset.s_g;
    p.s_fam = preset.s_fam;
    p.s_ftm = preset.s_ftm;
    p.f_freq = preset.f_freq;
    p.bw = preset.bw;
  }
  cfg.perf.validate();
  const std::uint64_t n = total_n == 0 ? static_cast<std::uint64_t>(cfg.perf.n_b) : total_n;
  const perf::PerfEstimate est = perf::estimate(cfg.perf, n);
  if (as_json) {
    std::cout << estimate_to_json(est).dump(2) << '\n';
    return 0;
  }
  std::printf("t_comp_max  %s s\n", format_number(est.t_comp_max).c_str());
  std::printf("t_ls        %s s\n", format_number(est.t_ls).c_str());
  std::printf("t_p         %s s\n", format_number(est.t_p).c_str());
  std::printf("throughput  %.0f E/s\n", est.max_throughput);
  std::printf("latency     %s s  (N = %llu)\n", format_number(est.latency).c_str(),
              static_cast<unsigned long long>(n));
  return 0;
}

int cmd_distill_fit(const Common& c, const std::string& out) {
  AppConfig cfg = resolve_config(c);
  const EdgeStream stream = load_stream(c, cfg);
  ModelParams params = load_weights(c.weights);
  if (!params.vanilla) throw SchemaError("distill-fit needs teacher attention weights (attn.*)");

  EngineConfig teacher_cfg = cfg.engine;
  teacher_cfg.variant = Variant::baseline;
  std::vector<DistillSample> samples;
  {
    ModelParams teacher = params;
    teacher.lut.reset();
    Engine engine(teacher_cfg, teacher);
    engine.set_distill_capture(&samples);
    run_stream(engine, stream.edges);
  }
  const std::size_t n = cfg.engine.n;
  SimplifiedAttnParams init =
      params.simplified ? *params.simplified : SimplifiedAttnParams{Vec(n, 0.0), Matrix(n, n, 0.0)};
  const FitResult fit = fit_attention_params(samples, init, cfg.kd_learning_rate, cfg.kd_steps,
                                             cfg.kd_temperature, cfg.kd_loss);
  if (fit.diverged) throw Error("distillation diverged; lower kd_learning_rate");
  params.simplified = fit.params;
  if (!params.value) params.value = random_params(cfg.engine, c.seed).value;
  save_weights(out, params);
  std::printf("samples %zu  loss %s -> %s  steps %zu\n", samples.size(),
              format_number(fit.loss_trace.front()).c_str(),
              format_number(fit.loss_trace.back()).c_str(), fit.loss_trace.size() - 1);
  return 0;
}

int cmd_build_lut(const Common& c, const std::string& out, std::optional<std::size_t> size) {
  AppConfig cfg = resolve_config(c);
  const EdgeStream stream = load_stream(c, cfg);
  ModelParams params = load_weights(c.weights);
  if (stream.dt_samples.empty()) throw ConfigError("no dt samples to build a LUT from");
  const std::size_t k = size.value_or(cfg.lut_size);
  TimeLut lut = build_lut(stream.dt_samples, k, params.encoder);
  params.lut = fuse_all(lut, params, cfg.engine);
  save_weights(out, params);
  const auto counts = interval_counts(*params.lut, stream.dt_samples);
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  std::printf("samples %zu  intervals %zu  per-interval count %zu..%zu\n",
              stream.dt_samples.size(), params.lut->size(), *lo, *hi);
  return 0;
}

int cmd_report(const std::string& run_path, const std::string& config, const std::string& budgets,
               const std::string& out) {
  std::ostringstream text;
  if (!run_path.empty()) {
    fs::path p(run_path);
    if (fs::is_directory(p)) p /= "report.json";
    const nlohmann::json doc = read_json_file(p);
    const CounterReport counters = counters_from_json(doc.at("counters"));
    const nlohmann::json& m = doc.at("metrics");
    text << "variant     " << doc.at("variant").get<std::string>() << '\n'
         << "edges       " << m.at("edges_processed").get<std::uint64_t>() << '\n'
         << "batches     " << m.at("batches").get<std::uint64_t>() << '\n'
         << "exec time   " << format_number(m.at("execution_seconds").get<double>()) << " s\n"
         << "throughput  " << format_number(m.at("throughput_eps").get<double>()) << " E/s\n";
    if (doc.contains("perf_estimate")) {
      const nlohmann::json& e = doc.at("perf_estimate");
      text << "model T_p   " << format_number(e.at("t_p").get<double>()) << " s\n"
           << "model max   " << format_number(e.at("max_throughput").get<double>()) << " E/s\n"
           << "model lat.  " << format_number(e.at("latency").get<double>()) << " s\n";
    }
    const nlohmann::json& u = doc.at("updater");
    text << "updater     cycles " << u.at("cycles").get<std::uint64_t>() << ", committed "
         << u.at("committed").get<std::uint64_t>() << ", invalidated "
         << u.at("invalidated").get<std::uint64_t>() << ", stalls "
         << u.at("stalls").get<std::uint64_t>() << "\n\n";
    text << counter_table(counters, "measured counters");
  }
  if (!config.empty()) {
    const AppConfig cfg = load_app_config(config);
    std::vector<std::size_t> ks;
    std::stringstream ss(budgets);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) ks.push_back(std::stoul(item));
    }
    if (!run_path.empty()) text << '\n';
    text << "per-embedding complexity\n" << complexity_table_text(complexity_table(cfg.engine, ks));
  }
  if (run_path.empty() && config.empty()) throw ConfigError("report needs --run and/or --config");
  if (out.empty()) {
    std::cout << text.str();
  } else {
    write_text_file(out, text.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming temporal GNN inference engine"};
  app.require_subcommand(1);

  Common common;

  auto* infer = app.add_subcommand("infer", "Run the engine over an edge stream");
  add_engine_flags(infer, common, false);
  std::string out_dir = "out", trace, clock = "wall", format = "csv", state;
  infer->add_option("--out", out_dir, "Output directory");
  infer->add_option("--trace", trace, "Updater trace, one JSON event per line");
  infer->add_option("--clock", clock, "wall | model (perf-model batch latency)")
      ->check(CLI::IsMember({"wall", "model"}));
  infer->add_option("--format", format, "Embedding file format: csv | f32 | f64")
      ->check(CLI::IsMember({"csv", "f32", "f64"}));
  infer->add_option("--state", state, "Write a store snapshot after the run");

  auto* perf_cmd = app.add_subcommand("perf", "Evaluate the analytical performance model");
  std::string perf_config, board;
  std::uint64_t total_n = 0;
  bool as_json = false;
  perf_cmd->add_option("--config", perf_config, "Config JSON")->required()->check(CLI::ExistingFile);
  perf_cmd->add_option("--board", board, "u200 | zcu104 hardware preset")
      ->check(CLI::IsMember({"u200", "zcu104"}));
  perf_cmd->add_option("--total", total_n, "Edges per batch N for the latency (default N_b)");
  perf_cmd->add_flag("--json", as_json, "Print JSON");

  Common distill_common;
  auto* distill = app.add_subcommand("distill-fit", "Fit simplified attention to a teacher run");
  add_engine_flags(distill, distill_common, true);
  std::string distill_out;
  distill->add_option("--out", distill_out, "Output weights JSON")->required();

  Common lut_common;
  auto* lut_cmd = app.add_subcommand("build-lut", "Build and fuse the time-encoding LUT");
  add_engine_flags(lut_cmd, lut_common, true);
  std::string lut_out;
  std::optional<std::size_t> lut_size;
  lut_cmd->add_option("--out", lut_out, "Output weights JSON")->required();
  lut_cmd->add_option("--size", lut_size, "Number of intervals (default lut_size)");

  auto* report = app.add_subcommand("report", "Print metrics, counters and complexity tables");
  std::string run_path, report_config, budgets = "2,4,6", report_out;
  report->add_option("--run", run_path, "infer output directory or report.json");
  report->add_option("--config", report_config, "Config JSON for the complexity table");
  report->add_option("--budgets", budgets, "Pruning budgets for the complexity table");
  report->add_option("--out", report_out, "Write the table to a file");

  auto* init = app.add_subcommand("init-weights", "Write seeded random weights for a config");
  std::string init_config, init_out;
  std::uint64_t init_seed = 1;
  init->add_option("--config", init_config, "Config JSON")->required()->check(CLI::ExistingFile);
  init->add_option("--seed", init_seed, "Seed");
  init->add_option("--out", init_out, "Output weights JSON")->required();

  auto* gen = app.add_subcommand("gen-stream", "Write a synthetic edge stream CSV");
  SyntheticSpec spec;
  std::string gen_out;
  gen->add_option("--edges", spec.edges, "Edge count");
  gen->add_option("--vertices", spec.vertices, "Vertex count");
  gen->add_option("--d-edge", spec.d_edge, "Edge feature length");
  gen->add_option("--mean-gap", spec.mean_gap, "Mean inter-arrival seconds");
  gen->add_option("--seed", spec.seed, "Seed");
  gen->add_option("--out", gen_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*infer) return cmd_infer(common, out_dir, trace, clock, format, state);
    if (*perf_cmd) return cmd_perf(perf_config, board, total_n, as_json);
    if (*distill) return cmd_distill_fit(distill_common, distill_out);
    if (*lut_cmd) return cmd_build_lut(lut_common, lut_out, lut_size);
    if (*report) return cmd_report(run_path, report_config, budgets, report_out);
    if (*init) {
      const AppConfig cfg = load_app_config(init_config);
      save_weights(init_out, random_params(cfg.engine, init_seed));
      return 0;
    }
    if (*gen) {
      std::ofstream f(gen_out, std::ios::binary);
      if (!f) throw Error("cannot write " + gen_out);
      write_edge_csv(f, synthetic_stream(spec));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return 3;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
