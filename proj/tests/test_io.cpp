#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "tgnn/app_config.hpp"
#include "tgnn/dataset.hpp"
#include "tgnn/engine.hpp"
#include "tgnn/report.hpp"
#include "tgnn/weights_io.hpp"

using namespace tgnn;
using nlohmann::json;

namespace {

EngineConfig io_config(Variant v) {
  EngineConfig c;
  c.d_mem = 3, c.d_edge = 2, c.d_feat = 1, c.d_time = 2, c.d_emb = 2;
  c.n = 3, c.mr = 4, c.budget = 2;
  c.variant = v;
  return c;
}

ModelParams full_params(const EngineConfig& c) {
  EngineConfig all = c;
  all.variant = Variant::sat_lut_np;
  ModelParams p = random_params(all, 11);
  p.vanilla = random_params(io_config(Variant::baseline), 12).vanilla;
  p.lut = fuse_all(build_lut(std::vector<double>{0.1, 0.5, 2.0, 9.0, 40.0}, 4, p.encoder), p, all);
  return p;
}

template <class E>
std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("weights round trip preserves every bit") {
  const ModelParams p = full_params(io_config(Variant::sat_lut_np));
  const json doc = weights_to_json(p);
  const ModelParams q = weights_from_json(json::parse(doc.dump()));
  CHECK(q == p);
  CHECK(testing_support::bit_equal(q.gru.W_ir.data(), p.gru.W_ir.data()));
  CHECK(testing_support::bit_equal(q.lut->fused_products.at("sat_v")[1],
                                   p.lut->fused_products.at("sat_v")[1]));
  CHECK(weights_to_json(q).dump() == doc.dump());
}

TEST_CASE("weights schema violations") {
  const json good = weights_to_json(random_params(io_config(Variant::baseline), 1));
  json bad = good;
  bad["arrays"].erase("gru.W_ir");
  CHECK(error_of<SchemaError>([&] { weights_from_json(bad); }).find("gru.W_ir") !=
        std::string::npos);
  bad = good;
  bad["arrays"]["gru.W_ir"]["data"].erase(0);
  CHECK_THROWS_AS(weights_from_json(bad), SchemaError);
  bad = good;
  bad["arrays"]["mystery"] = {{"shape", {1}}, {"data", {0.0}}};
  CHECK(error_of<SchemaError>([&] { weights_from_json(bad); }).find("mystery") !=
        std::string::npos);
  bad = good;
  bad["format"] = "other";
  CHECK_THROWS_AS(weights_from_json(bad), SchemaError);
  bad = good;
  bad["arrays"]["attn.W_q"]["data"][0] = "x";
  CHECK_THROWS_AS(weights_from_json(bad), SchemaError);

  // weights for other dims fail validation against the config
  const ModelParams wrong = random_params(io_config(Variant::baseline), 1);
  EngineConfig c = io_config(Variant::baseline);
  c.d_mem = 5;
  CHECK_THROWS_AS(wrong.validate(c), SchemaError);
}

TEST_CASE("weights file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "tgnn_test_weights.json";
  const ModelParams p = random_params(io_config(Variant::sat), 3);
  save_weights(path, p);
  CHECK(load_weights(path) == p);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_weights(path), Error);
}

TEST_CASE("app config parsing") {
  const json base = {{"d_mem", 4}, {"d_edge", 2}, {"d_time", 3}, {"d_emb", 5}};
  const AppConfig a = app_config_from_json(base);
  CHECK(a.engine.d_mem == 4);
  CHECK(a.engine.variant == Variant::baseline);
  CHECK(a.engine.batch.kind == BatchPolicy::Kind::fixed_count);
  CHECK(a.perf.f_mail == 2 * 4 + 2 + 3);
  CHECK(a.perf.f_feat == 2);
  CHECK(a.perf.f_emb == 5);

  json w = base;
  w["batch_window"] = 60.0;
  w["variant"] = "sat+lut+np";
  w["budget"] = 4;
  w["board"] = "zcu104";
  const AppConfig b = app_config_from_json(w);
  CHECK(b.engine.batch.kind == BatchPolicy::Kind::fixed_window);
  CHECK(b.engine.batch.window_seconds == 60.0);
  CHECK(b.engine.variant == Variant::sat_lut_np);

  auto names = [&](json doc, const std::string& key) {
    return error_of<ConfigError>([&] { app_config_from_json(doc); }).find(key) !=
           std::string::npos;
  };
  json m = base;
  m.erase("d_emb");
  CHECK(names(m, "d_emb"));
  m = base;
  m["d_mem"] = -1;
  CHECK(names(m, "d_mem"));
  m = base;
  m["variant"] = "fast";
  CHECK(names(m, "variant"));
  m = base;
  m["colour"] = 1;
  CHECK(names(m, "colour"));
  m = base;
  m["batch_size"] = 10;
  m["batch_window"] = 5.0;
  CHECK(names(m, "batch"));
  m = base;
  m["budget"] = 11;
  CHECK_THROWS_AS(app_config_from_json(m), ConfigError);
  m = base;
  m["board"] = "fpga9000";
  CHECK(names(m, "board"));
}

TEST_CASE("edge csv reading") {
  std::istringstream in(
      "user_id,item_id,timestamp,state_label,comma_separated_list_of_features\n"
      "0,1,0.0,0,0.1,0.2\n"
      "1,2,1.5,1,0.3,0.4\n"
      "0,2,1.5,0,-1,2e-3\n");
  const EdgeStream s = read_edge_csv(in);
  REQUIRE(s.edges.size() == 3);
  CHECK(s.stats.row_count == 3);
  CHECK(s.stats.vertex_count == 3);
  CHECK(s.stats.d_edge == 2);
  CHECK(s.stats.t_max == 1.5);
  CHECK(s.edges[2].edge_id == 2);
  CHECK(s.edges[2].features[1] == 2e-3);
  CHECK(s.labels[1] == 1);
  // rows 2 and 3 revisit vertices 1, 0 and 2
  CHECK(s.dt_samples == std::vector<double>{1.5, 1.5, 0.0});

  std::istringstream dec("h\n0,1,2.0,0,1\n1,2,1.0,0,1\n");
  try {
    read_edge_csv(dec);
    FAIL("decreasing timestamp accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream ar("h\n0,1,2.0,0,1\n1,2,3.0,0,1,2\n");
  CHECK_THROWS_AS(read_edge_csv(ar), ParseError);
  std::istringstream num("h\n0,x,2.0,0,1\n");
  CHECK_THROWS_AS(read_edge_csv(num), ParseError);
  std::istringstream fixed("h\n0,1,2.0,0,1\n");
  CHECK_THROWS_AS(read_edge_csv(fixed, 3), ParseError);
}

TEST_CASE("synthetic stream is deterministic and round-trips through csv") {
  const SyntheticSpec spec{500, 40, 3, 2.0, 7};
  const auto a = synthetic_stream(spec);
  CHECK(a == synthetic_stream(spec));
  CHECK(a.size() == 500);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].timestamp <= a[i].timestamp);
  std::stringstream buf;
  write_edge_csv(buf, a);
  const EdgeStream back = read_edge_csv(buf);
  CHECK(back.edges == a);
  CHECK(back.dt_samples == dt_profile(a));
}

TEST_CASE("store snapshot restores an engine that continues identically") {
  EngineConfig c = io_config(Variant::sat);
  c.batch = BatchPolicy::fixed_count(10);
  const ModelParams p = random_params(c, 2);
  const auto edges = synthetic_stream({300, 20, c.d_edge, 1.0, 3});
  const std::span<const TemporalEdge> all(edges);
  Engine a(c, p);
  run_stream(a, all.first(150));
  Engine b(c, p);
  load_snapshot(json::parse(snapshot_to_json(a.store()).dump()), b.store());
  CHECK(b.store().known_vertices() == a.store().known_vertices());
  for (VertexId v : a.store().known_vertices()) {
    CHECK(b.store().read_memory(v) == a.store().read_memory(v));
    CHECK(b.store().read_mailbox(v) == a.store().read_mailbox(v));
    CHECK(b.store().ring(v) == a.store().ring(v));
  }
  std::vector<Vec> out_a, out_b;
  RunOptions oa, ob;
  oa.on_embedding = [&](const EmbeddingRecord& r) { out_a.push_back(r.embedding); };
  ob.on_embedding = [&](const EmbeddingRecord& r) { out_b.push_back(r.embedding); };
  run_stream(a, all.subspan(150), oa);
  run_stream(b, all.subspan(150), ob);
  REQUIRE(out_a.size() == out_b.size());
  for (std::size_t i = 0; i < out_a.size(); ++i) {
    CHECK(testing_support::bit_equal(out_a[i], out_b[i]));
  }
}

TEST_CASE("binary embedding records round trip") {
  std::vector<EmbeddingRecord> recs{{0, 5, 1.25, {0.1, -2.0, 3.5}}, {3, 9, 7.0, {1e-300, 0.0, -0.0}}};
  for (EmbeddingFormat f : {EmbeddingFormat::f64, EmbeddingFormat::f32}) {
    std::stringstream buf;
    EmbeddingWriter w(buf, f, 3);
    for (const auto& r : recs) w.write(r);
    CHECK(w.records() == 2);
    const auto back = read_embeddings_binary(buf, f, 3);
    REQUIRE(back.size() == 2);
    CHECK(back[1].batch == 3);
    CHECK(back[1].vertex == 9);
    CHECK(back[1].timestamp == 7.0);
    if (f == EmbeddingFormat::f64) {
      CHECK(testing_support::bit_equal(back[0].embedding, recs[0].embedding));
    } else {
      CHECK(back[0].embedding[0] == static_cast<double>(0.1f));
    }
  }
  std::stringstream csv;
  EmbeddingWriter w(csv, EmbeddingFormat::csv, 3);
  w.write(recs[0]);
  CHECK(csv.str() == "batch,vertex,timestamp,e_1,e_2,e_3\n0,5,1.25,0.10000000000000001,-2,3.5\n");
  CHECK_THROWS_AS(parse_embedding_format("f16"), ConfigError);
}

TEST_CASE("counter json round trip and report totals") {
  CounterReport c;
  c[Stage::sample] = {0, 30};
  c[Stage::memory] = {1200, 70};
  c[Stage::gnn] = {5000, 0};
  c[Stage::update] = {0, 45};
  const json j = counters_to_json(c);
  CHECK(j["Total"]["mac"] == 6200);
  CHECK(j["Total"]["mem"] == 145);
  CHECK(counters_from_json(j) == c);
  const std::string table = counter_table(c, "run");
  CHECK(table.find("Total") != std::string::npos);
  CHECK(table.find("6200") != std::string::npos);
}
