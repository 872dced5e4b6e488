#include "tgnn/report.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>

namespace tgnn {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary embedding blocks assume a little-endian host");

EmbeddingFormat parse_embedding_format(const std::string& name) {
  if (name == "csv") return EmbeddingFormat::csv;
  if (name == "f32") return EmbeddingFormat::f32;
  if (name == "f64") return EmbeddingFormat::f64;
  throw ConfigError("unknown embedding format '" + name + "' (csv, f32, f64)");
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
bool get(std::istream& in, T& value) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) return false;
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

}  // namespace

EmbeddingWriter::EmbeddingWriter(std::ostream& out, EmbeddingFormat format, std::size_t d_emb)
    : out_(out), format_(format), d_emb_(d_emb) {
  if (format_ == EmbeddingFormat::csv) {
    out_ << "batch,vertex,timestamp";
    for (std::size_t j = 1; j <= d_emb_; ++j) out_ << ",e_" << j;
    out_ << '\n';
  }
}

void EmbeddingWriter::write(const EmbeddingRecord& rec) {
  if (rec.embedding.size() != d_emb_) throw ConfigError("embedding width differs from d_emb");
  switch (format_) {
    case EmbeddingFormat::csv:
      out_ << rec.batch << ',' << rec.vertex << ',' << format_number(rec.timestamp);
      for (double x : rec.embedding) out_ << ',' << format_number(x);
      out_ << '\n';
      break;
    case EmbeddingFormat::f32:
    case EmbeddingFormat::f64:
      put<std::uint64_t>(out_, rec.batch);
      put<std::uint64_t>(out_, rec.vertex);
      put<double>(out_, rec.timestamp);
      for (double x : rec.embedding) {
        if (format_ == EmbeddingFormat::f32) {
          put<float>(out_, static_cast<float>(x));
        } else {
          put<double>(out_, x);
        }
      }
      break;
  }
  ++records_;
}

std::vector<EmbeddingRecord> read_embeddings_binary(std::istream& in, EmbeddingFormat format,
                                                    std::size_t d_emb) {
  if (format == EmbeddingFormat::csv) throw ConfigError("csv embeddings are text");
  std::vector<EmbeddingRecord> out;
  while (true) {
    EmbeddingRecord rec;
    std::uint64_t batch = 0;
    if (!get(in, batch)) break;
    rec.batch = batch;
    if (!get(in, rec.vertex) || !get(in, rec.timestamp)) throw ParseError("truncated record", 0);
    rec.embedding.resize(d_emb);
    for (double& x : rec.embedding) {
      bool ok = false;
      if (format == EmbeddingFormat::f32) {
        float f = 0;
        ok = get(in, f);
        x = f;
      } else {
        ok = get(in, x);
      }
      if (!ok) throw ParseError("truncated record", 0);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

json counters_to_json(const CounterReport& c) {
  json out = json::object();
  for (std::size_t s = 0; s < kStageCount; ++s) {
    out[to_string(static_cast<Stage>(s))] = {{"mac", c.stages[s].mac}, {"mem", c.stages[s].mem}};
  }
  const StageCount t = c.total();
  out["Total"] = {{"mac", t.mac}, {"mem", t.mem}};
  return out;
}

CounterReport counters_from_json(const json& doc) {
  CounterReport c;
  try {
    for (std::size_t s = 0; s < kStageCount; ++s) {
      const json& row = doc.at(to_string(static_cast<Stage>(s)));
      c.stages[s].mac = row.at("mac").get<std::uint64_t>();
      c.stages[s].mem = row.at("mem").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("counter report: ") + e.what());
  }
  return c;
}

json metrics_to_json(const RunMetrics& m) {
  return json{{"edges_processed", m.edges_processed},
              {"batches", m.batches},
              {"execution_seconds", m.execution_seconds},
              {"throughput_eps", m.throughput_eps},
              {"per_batch_latency", m.per_batch_latency},
              {"batch_sizes", m.batch_sizes}};
}

json updater_to_json(const UpdaterStats& s) {
  return json{{"cycles", s.cycles},
              {"submitted", s.submitted},
              {"committed", s.committed},
              {"invalidated", s.invalidated},
              {"stalls", s.stalls}};
}

json estimate_to_json(const perf::PerfEstimate& e) {
  return json{{"t_comp_max", e.t_comp_max},
              {"t_ls", e.t_ls},
              {"t_p", e.t_p},
              {"max_throughput", e.max_throughput},
              {"latency", e.latency}};
}

json run_report(const EngineConfig& config, const RunResult& run,
                const std::optional<perf::PerfEstimate>& estimate) {
  json out{{"variant", to_string(config.variant)},
           {"metrics", metrics_to_json(run.metrics)},
           {"counters", counters_to_json(run.counters)},
           {"updater", updater_to_json(run.updater)},
           {"per_embedding_closed_form", counters_to_json(count_ops(config))}};
  if (estimate) out["perf_estimate"] = estimate_to_json(*estimate);
  return out;
}

std::string counter_table(const CounterReport& c, const std::string& title) {
  std::string out = title + "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-8s %16s %16s\n", "stage", "MAC", "MEM");
  out += buf;
  auto row = [&](const char* name, const StageCount& s) {
    std::snprintf(buf, sizeof buf, "%-8s %16llu %16llu\n", name,
                  static_cast<unsigned long long>(s.mac), static_cast<unsigned long long>(s.mem));
    out += buf;
  };
  for (std::size_t s = 0; s < kStageCount; ++s) row(to_string(static_cast<Stage>(s)), c.stages[s]);
  row("Total", c.total());
  return out;
}

std::string complexity_table_text(const std::vector<ComplexityRow>& rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %4s %8s %7s %9s %9s %9s %7s\n", "model", "nbrs", "kMEM",
                "MEM%", "kMAC.GRU", "kMAC.GNN", "kMAC.all", "MAC%");
  out += buf;
  for (const ComplexityRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %4zu %8.1f %6.1f%% %9.1f %9.1f %9.1f %6.1f%%\n",
                  r.label.c_str(), r.neighbors, r.kmem, r.mem_percent, r.kmac_gru, r.kmac_gnn,
                  r.kmac_total, r.mac_percent);
    out += buf;
  }
  return out;
}

json snapshot_to_json(const GraphStore& store) {
  json vertices = json::array();
  std::set<EdgeId> edges;
  for (VertexId v : store.known_vertices()) {
    const MemoryEntry mem = store.read_memory(v);
    const MailboxEntry mail = store.read_mailbox(v);
    json ring = json::array();
    for (const NeighborRecord& r : store.ring(v).records()) {
      ring.push_back({r.nbr, r.edge_id, r.timestamp});
      edges.insert(r.edge_id);
    }
    json entry{{"id", v},
               {"memory", mem.memory},
               {"last_update", mem.last_update},
               {"features", store.vertex_features(v)},
               {"ring", std::move(ring)}};
    if (mail.present) {
      entry["mailbox"] = {{"raw_message", mail.raw_message}, {"msg_timestamp", mail.msg_timestamp}};
    }
    vertices.push_back(std::move(entry));
  }
  json edge_features = json::array();
  for (EdgeId e : edges) edge_features.push_back({{"id", e}, {"features", store.edge_features(e)}});
  const StoreDims& d = store.dims();
  return json{{"format", "tgnn-snapshot"},
              {"dims", {{"d_mem", d.d_mem}, {"d_edge", d.d_edge}, {"d_feat", d.d_feat}, {"mr", d.mr}}},
              {"vertices", std::move(vertices)},
              {"edges", std::move(edge_features)}};
}

void load_snapshot(const json& doc, GraphStore& store) {
  try {
    if (doc.at("format") != "tgnn-snapshot") throw SchemaError("not a tgnn-snapshot document");
    const json& d = doc.at("dims");
    const StoreDims& dims = store.dims();
    if (d.at("d_mem") != dims.d_mem || d.at("d_edge") != dims.d_edge ||
        d.at("d_feat") != dims.d_feat || d.at("mr") != dims.mr) {
      throw SchemaError("snapshot dims differ from the engine config");
    }
    for (const json& e : doc.at("edges")) {
      store.set_edge_features(e.at("id").get<EdgeId>(), e.at("features").get<Vec>());
    }
    for (const json& v : doc.at("vertices")) {
      const auto id = v.at("id").get<VertexId>();
      store.write_memory(id, MemoryEntry{v.at("memory").get<Vec>(), v.at("last_update").get<double>()});
      store.set_vertex_features(id, v.at("features").get<Vec>());
      NeighborRing ring(dims.mr);
      for (const json& r : v.at("ring")) {
        ring.push({r.at(0).get<VertexId>(), r.at(1).get<EdgeId>(), r.at(2).get<double>()});
      }
      store.write_ring(id, std::move(ring));
      if (v.contains("mailbox")) {
        const json& m = v.at("mailbox");
        store.write_mailbox(id, MailboxEntry{m.at("raw_message").get<Vec>(),
                                             m.at("msg_timestamp").get<double>(), true});
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("snapshot: ") + e.what());
  }
}

}  // namespace tgnn
