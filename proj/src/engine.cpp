#include "tgnn/engine.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <unordered_map>

#include "parallel.hpp"

namespace tgnn {

namespace {

struct BatchVertex {
  VertexId id = 0;
  Timestamp earliest = 0.0;
  Timestamp latest = 0.0;
};

void check_chronology(std::span<const TemporalEdge> edges, std::optional<Timestamp> last,
                      std::size_t d_edge) {
  Timestamp prev = last.value_or(edges.front().timestamp);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const TemporalEdge& e = edges[i];
    if (e.timestamp < prev || !std::isfinite(e.timestamp)) {
      throw StreamOrderError("edge " + std::to_string(e.edge_id) + " at t=" +
                             std::to_string(e.timestamp) + " precedes t=" + std::to_string(prev));
    }
    if (e.features.size() != d_edge) {
      throw ConfigError("edge " + std::to_string(e.edge_id) + " has " +
                        std::to_string(e.features.size()) + " features, expected " +
                        std::to_string(d_edge));
    }
    prev = e.timestamp;
  }
}

}  // namespace

Engine::Engine(EngineConfig config, ModelParams params)
    : config_(config),
      params_(std::move(params)),
      store_(StoreDims{config.d_mem, config.d_edge, config.d_feat, config.mr}),
      updater_(UpdaterConfig{config.updater_lines, config.n_cu, config.scan_width},
               [this](const TraceEvent& e) {
                 if (trace_sink_) trace_sink_(e);
               }) {
  params_.validate(config_);
  if (params_.lut && uses_lut(config_.variant)) {
    const auto& fused = params_.lut->fused_products;
    const bool complete = fused.count(kConsumerGruR) && fused.count(kConsumerGruZ) &&
                          fused.count(kConsumerGruN) && fused.count(kConsumerSatV);
    if (!complete) params_.lut = fuse_all(*params_.lut, params_, config_);
  }
  serialized_observer_ = [this](double dt) {
    std::lock_guard lock(observer_mutex_);
    if (dt_observer_) dt_observer_(dt);
  };
}

void Engine::set_trace_sink(Updater<VertexWrite>::Sink sink) { trace_sink_ = std::move(sink); }

void Engine::set_commit_observer(std::function<void(VertexId, const VertexWrite&)> observer) {
  commit_observer_ = std::move(observer);
}

void Engine::set_dt_observer(std::function<void(double)> observer) {
  dt_observer_ = std::move(observer);
}

void Engine::apply_write(VertexId v, const VertexWrite& w) {
  if (w.memory) store_.write_memory(v, *w.memory);
  store_.write_mailbox(v, w.mailbox);
  store_.write_ring(v, w.neighbors);
  if (commit_observer_) commit_observer_(v, w);
}

BatchResult Engine::process_batch(std::span<const TemporalEdge> edges) {
  if (edges.empty()) throw PreconditionError("process_batch needs at least one edge");
  check_chronology(edges, last_timestamp_, config_.d_edge);

  const std::size_t D = config_.d_mem;
  const std::size_t F = config_.d_feat;
  const std::size_t E = config_.d_edge;
  const std::size_t R = config_.raw_message_len();
  const bool simplified = uses_simplified_attention(config_.variant);
  const std::size_t budget = config_.kept_slots();

  TimePath time = uses_lut(config_.variant) ? TimePath::lut(*params_.lut)
                                            : TimePath::cosine(params_.encoder);
  TimePath cosine = TimePath::cosine(params_.encoder);
  if (dt_observer_) {
    time.set_observer(&serialized_observer_);
    cosine.set_observer(&serialized_observer_);
  }

  // unique vertices in order of first appearance
  std::vector<BatchVertex> vertices;
  std::unordered_map<VertexId, std::size_t> index;
  std::vector<std::size_t> appends;
  auto touch = [&](VertexId v, Timestamp t) {
    auto [it, inserted] = index.try_emplace(v, vertices.size());
    if (inserted) {
      vertices.push_back({v, t, t});
      appends.push_back(0);
    } else {
      vertices[it->second].latest = t;
    }
    ++appends[it->second];
  };
  for (const TemporalEdge& e : edges) {
    touch(e.src, e.timestamp);
    if (e.dst != e.src) touch(e.dst, e.timestamp);
    store_.set_edge_features(e.edge_id, e.features);
  }
  const std::size_t nv = vertices.size();
  std::vector<CounterReport> per_vertex(nv);

  // 1. memory update
  std::vector<Vec> memory(nv);
  std::vector<char> had_message(nv, 0);
  detail::parallel_for(nv, config_.threads, [&](std::size_t i) {
    const BatchVertex& bv = vertices[i];
    CounterReport& ops = per_vertex[i];
    MemoryEntry current = store_.read_memory(bv.id);
    ops[Stage::memory].mem += D + F;  // own memory and static features
    const MailboxEntry mail = store_.read_mailbox(bv.id);
    if (mail.present) {
      ops[Stage::memory].mem += R + 1;
      OpCounter mac;
      memory[i] = gru_update(mail.raw_message, mail.msg_timestamp, bv.earliest, current.memory,
                             params_.gru, time, &mac, config_.precision);
      ops[Stage::memory].mac += mac.mac;
      had_message[i] = 1;
    } else {
      memory[i] = std::move(current.memory);
    }
  });

  auto memory_of = [&](VertexId u) -> Vec {
    if (auto it = index.find(u); it != index.end()) return memory[it->second];
    return store_.read_memory(u).memory;
  };
  auto fetch_neighbor = [&](const NeighborSlot& slot, CounterReport& ops) {
    NeighborInput in;
    in.memory = memory_of(slot.record.nbr);
    in.features = store_.vertex_features(slot.record.nbr);
    in.edge_features = store_.edge_features(slot.record.edge_id);
    in.timestamp = slot.record.timestamp;
    in.masked = false;
    ops[Stage::memory].mem += D + F + E;
    return in;
  };

  // 2. embeddings
  std::vector<Vec> embeddings(nv);
  std::vector<std::optional<DistillSample>> captured(nv);
  const bool capture = distill_out_ != nullptr && !simplified;
  detail::parallel_for(nv, config_.threads, [&](std::size_t i) {
    const BatchVertex& bv = vertices[i];
    CounterReport& ops = per_vertex[i];
    const auto slots = store_.get_recent_neighbors(bv.id, config_.n);
    std::size_t valid = 0;
    for (const auto& s : slots) valid += s.masked ? 0 : 1;
    ops[Stage::sample].mem += 3 * valid;

    SelfInput self{memory[i], store_.vertex_features(bv.id), bv.latest};
    OpCounter mac;
    if (!simplified) {
      std::vector<NeighborInput> inputs(slots.size());
      for (std::size_t j = 0; j < slots.size(); ++j) {
        if (!slots[j].masked) inputs[j] = fetch_neighbor(slots[j], ops);
      }
      Vec logits;
      embeddings[i] = vanilla_attention(self, inputs, params_.merge, *params_.vanilla,
                                        params_.encoder, &mac, capture ? &logits : nullptr);
      if (capture) {
        DistillSample sample;
        sample.teacher_logits = logits;
        sample.dt_vec.assign(slots.size(), 0.0);
        sample.mask.resize(slots.size());
        for (std::size_t j = 0; j < slots.size(); ++j) {
          sample.mask[j] = slots[j].masked;
          if (!slots[j].masked) sample.dt_vec[j] = bv.latest - slots[j].record.timestamp;
        }
        captured[i] = std::move(sample);
      }
    } else {
      std::vector<Timestamp> ts(slots.size());
      std::vector<bool> mask(slots.size());
      for (std::size_t j = 0; j < slots.size(); ++j) {
        ts[j] = slots[j].record.timestamp;
        mask[j] = slots[j].masked;
      }
      const NeighborSelection sel =
          select_neighbors(ts, mask, bv.latest, budget, *params_.simplified, &mac);
      std::vector<NeighborInput> kept;
      kept.reserve(sel.kept.size());
      for (std::size_t j : sel.kept) kept.push_back(fetch_neighbor(slots[j], ops));
      embeddings[i] =
          aggregate_selected(self, sel, kept, params_.merge, *params_.value, time, &mac);
    }
    ops[Stage::gnn].mac += mac.mac;
  });

  // 3 + 4. messages, mailbox aggregation and neighbor appends, per endpoint
  std::vector<NeighborRing> rings(nv);
  std::vector<std::optional<PendingMessage>> best(nv);
  for (std::size_t i = 0; i < nv; ++i) rings[i] = store_.ring(vertices[i].id);

  std::vector<Submission<VertexWrite>> items;
  items.reserve(2 * edges.size());
  std::uint64_t order = 0;
  for (const TemporalEdge& e : edges) {
    const std::size_t si = index.at(e.src);
    const std::size_t di = index.at(e.dst);
    auto [to_src, to_dst] = generate_messages(e, memory[si], memory[di]);
    auto emit = [&](std::size_t vi, VertexId other, RawMessage msg) {
      const PendingMessage incoming{std::move(msg.raw_message), msg.msg_timestamp, order++};
      if (best[vi]) {
        const PendingMessage pair[2] = {*best[vi], incoming};
        best[vi] = aggregate_most_recent(pair);
      } else {
        best[vi] = incoming;
      }
      rings[vi].push(NeighborRecord{other, e.edge_id, e.timestamp});
      VertexWrite w;
      if (had_message[vi]) w.memory = MemoryEntry{memory[vi], vertices[vi].earliest};
      w.mailbox = MailboxEntry{best[vi]->raw_message, best[vi]->msg_timestamp, true};
      w.neighbors = rings[vi];
      items.push_back({vertices[vi].id, std::move(w)});
    };
    emit(si, e.dst, std::move(to_src));
    if (di != si) emit(di, e.src, std::move(to_dst));
  }

  for (std::size_t i = 0; i < nv; ++i) {
    per_vertex[i][Stage::update].mem += (had_message[i] ? D + 1 : 0) + (R + 1) + 3 * appends[i];
  }

  // 5. state writes
  BatchResult result;
  if (config_.updater_enabled) {
    result.updater = run_round_robin<VertexWrite>(
        updater_, std::move(items), [&](Commit<VertexWrite>& c) { apply_write(c.vid, c.payload); });
  } else {
    for (const auto& item : items) apply_write(item.vid, item.payload);
  }

  result.embeddings.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    result.embeddings.push_back({batches_, vertices[i].id, vertices[i].latest, std::move(embeddings[i])});
    result.counters += per_vertex[i];
    if (capture && captured[i]) distill_out_->push_back(std::move(*captured[i]));
  }
  counters_ += result.counters;
  updater_stats_ += result.updater;
  last_timestamp_ = edges.back().timestamp;
  ++batches_;
  return result;
}

std::vector<std::span<const TemporalEdge>> partition_batches(std::span<const TemporalEdge> edges,
                                                             const BatchPolicy& policy) {
  std::vector<std::span<const TemporalEdge>> out;
  if (policy.kind == BatchPolicy::Kind::fixed_count) {
    if (policy.count == 0) throw ConfigError("fixed-count batch size must be positive");
    for (std::size_t i = 0; i < edges.size(); i += policy.count) {
      out.push_back(edges.subspan(i, std::min(policy.count, edges.size() - i)));
    }
    return out;
  }
  if (!(policy.window_seconds > 0.0)) throw ConfigError("batch window must be positive");
  std::size_t begin = 0;
  while (begin < edges.size()) {
    const double window = std::floor(edges[begin].timestamp / policy.window_seconds);
    std::size_t end = begin + 1;
    while (end < edges.size() &&
           std::floor(edges[end].timestamp / policy.window_seconds) == window) {
      ++end;
    }
    out.push_back(edges.subspan(begin, end - begin));
    begin = end;
  }
  return out;
}

double throughput(std::uint64_t edges, double seconds) {
  return seconds > 0.0 ? static_cast<double>(edges) / seconds : 0.0;
}

RunResult run_stream(Engine& engine, std::span<const TemporalEdge> edges,
                     const RunOptions& options) {
  if (options.timing == Timing::model && !options.perf) {
    throw ConfigError("model timing needs a perf config");
  }
  RunResult result;
  const CounterReport counters_before = engine.counters();
  const UpdaterStats updater_before = engine.updater_stats();
  for (auto batch : partition_batches(edges, engine.config().batch)) {
    double latency = 0.0;
    if (options.timing == Timing::wall) {
      const auto start = std::chrono::steady_clock::now();
      BatchResult r = engine.process_batch(batch);
      latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (options.on_embedding) {
        for (const auto& rec : r.embeddings) options.on_embedding(rec);
      }
    } else {
      BatchResult r = engine.process_batch(batch);
      latency = perf::estimate(*options.perf, batch.size()).latency;
      if (options.on_embedding) {
        for (const auto& rec : r.embeddings) options.on_embedding(rec);
      }
    }
    result.metrics.per_batch_latency.push_back(latency);
    result.metrics.batch_sizes.push_back(batch.size());
    result.metrics.execution_seconds += latency;
    result.metrics.edges_processed += batch.size();
    ++result.metrics.batches;
  }
  result.metrics.throughput_eps =
      throughput(result.metrics.edges_processed, result.metrics.execution_seconds);

  result.counters = engine.counters();
  for (std::size_t s = 0; s < kStageCount; ++s) {
    result.counters.stages[s].mac -= counters_before.stages[s].mac;
    result.counters.stages[s].mem -= counters_before.stages[s].mem;
  }
  result.updater = engine.updater_stats();
  result.updater.cycles -= updater_before.cycles;
  result.updater.submitted -= updater_before.submitted;
  result.updater.committed -= updater_before.committed;
  result.updater.invalidated -= updater_before.invalidated;
  result.updater.stalls -= updater_before.stalls;
  return result;
}

RunResult run_stream(std::span<const TemporalEdge> edges, const EngineConfig& config,
                     const ModelParams& params, const RunOptions& options) {
  Engine engine(config, params);
  return run_stream(engine, edges, options);
}

}  // namespace tgnn
