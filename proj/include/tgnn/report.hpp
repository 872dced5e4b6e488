#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgnn/engine.hpp"

namespace tgnn {

enum class EmbeddingFormat { csv, f32, f64 };
EmbeddingFormat parse_embedding_format(const std::string& name);

// csv: "batch,vertex,timestamp,e_1..e_d" per line, %.17g values.
// f32/f64: per record, little-endian u64 batch, u64 vertex, f64 timestamp,
// then d values of the chosen width.
class EmbeddingWriter {
 public:
  EmbeddingWriter(std::ostream& out, EmbeddingFormat format, std::size_t d_emb);
  void write(const EmbeddingRecord& rec);
  std::uint64_t records() const { return records_; }

 private:
  std::ostream& out_;
  EmbeddingFormat format_;
  std::size_t d_emb_;
  std::uint64_t records_ = 0;
};

std::vector<EmbeddingRecord> read_embeddings_binary(std::istream& in, EmbeddingFormat format,
                                                    std::size_t d_emb);

std::string format_number(double x);  // %.17g

nlohmann::json counters_to_json(const CounterReport& c);
CounterReport counters_from_json(const nlohmann::json& doc);
nlohmann::json metrics_to_json(const RunMetrics& m);
nlohmann::json updater_to_json(const UpdaterStats& s);
nlohmann::json estimate_to_json(const perf::PerfEstimate& e);

// The infer report: run metrics, counters, updater stats, the per-embedding
// closed form and, when given, the perf-model estimate for the mean batch.
nlohmann::json run_report(const EngineConfig& config, const RunResult& run,
                          const std::optional<perf::PerfEstimate>& estimate);

// Fixed-width text table; one row per stage plus a Total row.
std::string counter_table(const CounterReport& c, const std::string& title);

// Fixed-width per-embedding complexity table.
std::string complexity_table_text(const std::vector<ComplexityRow>& rows);

// Store snapshot: every known vertex with memory, mailbox and ring, plus the
// edge features the rings reference.
nlohmann::json snapshot_to_json(const GraphStore& store);
void load_snapshot(const nlohmann::json& doc, GraphStore& store);

}  // namespace tgnn
