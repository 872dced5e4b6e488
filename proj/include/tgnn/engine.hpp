#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "tgnn/counters.hpp"
#include "tgnn/distill.hpp"
#include "tgnn/graph_store.hpp"
#include "tgnn/model.hpp"
#include "tgnn/perf_model.hpp"
#include "tgnn/updater_sim.hpp"

namespace tgnn {

struct EmbeddingRecord {
  std::size_t batch = 0;
  VertexId vertex = 0;
  Timestamp timestamp = 0.0;  // the vertex's latest timestamp in the batch
  Vec embedding;
};

// The vertex information one CU hands to the Updater after processing one
// endpoint of one edge: cumulative over the batch so far.
struct VertexWrite {
  std::optional<MemoryEntry> memory;
  MailboxEntry mailbox;
  NeighborRing neighbors;
};

struct BatchResult {
  // one per unique batch vertex, in order of first appearance
  std::vector<EmbeddingRecord> embeddings;
  CounterReport counters;
  UpdaterStats updater;
};

// Executes the inference loop batch by batch over one GraphStore:
//   1. GRU memory update of every batch vertex holding a cached message,
//      consumed at the vertex's earliest batch timestamp;
//   2. embeddings of every batch vertex from the updated memories and the
//      pre-batch neighbor table;
//   3. new raw messages per edge, most-recent aggregated into the mailbox;
//   4. neighbor-table appends;
//   5. all vertex writes, through the Updater when enabled.
class Engine {
 public:
  Engine(EngineConfig config, ModelParams params);

  const EngineConfig& config() const { return config_; }
  const ModelParams& params() const { return params_; }
  GraphStore& store() { return store_; }
  const GraphStore& store() const { return store_; }

  // Throws StreamOrderError if the batch is not chronological or starts
  // before the previous batch ended.
  BatchResult process_batch(std::span<const TemporalEdge> edges);

  const CounterReport& counters() const { return counters_; }
  const UpdaterStats& updater_stats() const { return updater_stats_; }
  std::size_t batches_processed() const { return batches_; }

  void set_trace_sink(Updater<VertexWrite>::Sink sink);
  // Sees every vertex write as it is committed to the store.
  void set_commit_observer(std::function<void(VertexId, const VertexWrite&)> observer);
  // Sees every time difference fed to the time encoder (serialized).
  void set_dt_observer(std::function<void(double)> observer);
  // Baseline variant only: collects (dt, teacher logits, mask) per embedding.
  void set_distill_capture(std::vector<DistillSample>* out) { distill_out_ = out; }

 private:
  void apply_write(VertexId v, const VertexWrite& w);

  EngineConfig config_;
  ModelParams params_;
  GraphStore store_;
  Updater<VertexWrite> updater_;
  Updater<VertexWrite>::Sink trace_sink_;
  std::function<void(VertexId, const VertexWrite&)> commit_observer_;
  std::function<void(double)> dt_observer_;
  TimePath::Observer serialized_observer_;
  std::mutex observer_mutex_;
  std::vector<DistillSample>* distill_out_ = nullptr;

  CounterReport counters_;
  UpdaterStats updater_stats_;
  std::size_t batches_ = 0;
  std::optional<Timestamp> last_timestamp_;
};

// Splits a chronological stream per the batch policy. Fixed windows are
// [k W, (k + 1) W) in stream time; empty windows produce no batch.
std::vector<std::span<const TemporalEdge>> partition_batches(std::span<const TemporalEdge> edges,
                                                             const BatchPolicy& policy);

struct RunMetrics {
  std::uint64_t edges_processed = 0;
  std::size_t batches = 0;
  double execution_seconds = 0.0;
  double throughput_eps = 0.0;  // edges_processed / execution_seconds
  std::vector<double> per_batch_latency;
  std::vector<std::size_t> batch_sizes;
};

double throughput(std::uint64_t edges, double seconds);

enum class Timing {
  wall,   // steady clock around each batch
  model,  // perf-model latency of each batch; deterministic
};

struct RunOptions {
  Timing timing = Timing::wall;
  std::optional<perf::PerfConfig> perf;  // required for Timing::model
  std::function<void(const EmbeddingRecord&)> on_embedding;
};

struct RunResult {
  RunMetrics metrics;
  CounterReport counters;
  UpdaterStats updater;
};

// Runs every batch of the stream through `engine`.
RunResult run_stream(Engine& engine, std::span<const TemporalEdge> edges,
                     const RunOptions& options = {});
RunResult run_stream(std::span<const TemporalEdge> edges, const EngineConfig& config,
                     const ModelParams& params, const RunOptions& options = {});

}  // namespace tgnn
