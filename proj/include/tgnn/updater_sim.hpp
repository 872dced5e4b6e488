#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tgnn/types.hpp"

namespace tgnn {

// Per-cycle Updater events, emitted to an optional sink.
struct TraceEvent {
  enum class Kind { submit, invalidate, commit, skip, stall };

  std::uint64_t cycle = 0;
  Kind kind = Kind::submit;
  std::size_t line = 0;
  VertexId vid = 0;
  std::size_t cu = 0;  // meaningful for submit and stall
};

const char* to_string(TraceEvent::Kind kind);
// One line-delimited JSON record, no trailing newline.
std::string format_trace_event(const TraceEvent& event);
TraceEvent parse_trace_event(const std::string& line);

struct UpdaterConfig {
  std::size_t lines = 64;
  std::size_t n_cu = 1;
  std::size_t scan_width = 3;
};

struct UpdaterStats {
  std::uint64_t cycles = 0;
  std::uint64_t submitted = 0;
  std::uint64_t committed = 0;
  std::uint64_t invalidated = 0;
  std::uint64_t stalls = 0;

  UpdaterStats& operator+=(const UpdaterStats& o) {
    cycles += o.cycles;
    submitted += o.submitted;
    committed += o.committed;
    invalidated += o.invalidated;
    stalls += o.stalls;
    return *this;
  }
  bool operator==(const UpdaterStats&) const = default;
};

template <class Payload>
struct Commit {
  VertexId vid = 0;
  Payload payload;
};

// Chronological-commit cache: a ring of L fully-associative lines. CU i writes
// lines i, i + n_cu, i + 2 n_cu, ... (mod L), so round-robin arrival order is
// ring order. A new write invalidates every older uncommitted line holding the
// same vertex. Each cycle the commit pointer examines up to scan_width lines,
// emits valid ones, frees invalidated ones, and stops at the first free line.
template <class Payload>
class Updater {
 public:
  using Sink = std::function<void(const TraceEvent&)>;

  explicit Updater(UpdaterConfig config, Sink sink = {})
      : config_(config), lines_(config.lines), write_pointers_(config.n_cu),
        sink_(std::move(sink)) {
    if (config_.lines == 0 || config_.n_cu == 0 || config_.scan_width == 0) {
      throw ConfigError("updater needs positive lines, n_cu and scan_width");
    }
    if (config_.lines % config_.n_cu != 0) {
      throw ConfigError("updater line count must be a multiple of n_cu");
    }
    for (std::size_t i = 0; i < config_.n_cu; ++i) write_pointers_[i] = i;
  }

  const UpdaterConfig& config() const { return config_; }
  const UpdaterStats& stats() const { return stats_; }
  std::uint64_t cycle() const { return stats_.cycles; }
  std::size_t commit_pointer() const { return commit_pointer_; }
  std::size_t write_pointer(std::size_t cu) const { return write_pointers_.at(cu); }
  bool empty() const { return occupied_ == 0; }
  std::size_t occupied() const { return occupied_; }

  // The line CU `cu` writes next is free.
  bool can_submit(std::size_t cu) const { return !lines_[write_pointers_.at(cu)].occupied; }

  // Writes into the CU's current line. Returns false (and records a stall)
  // when that line is still occupied; the caller retries after a commit cycle.
  bool try_submit(std::size_t cu, VertexId vid, Payload payload) {
    if (cu >= config_.n_cu) throw PreconditionError("CU index out of range");
    const std::size_t target = write_pointers_[cu];
    if (lines_[target].occupied) {
      note_stall(cu, vid);
      return false;
    }
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      Line& line = lines_[i];
      if (line.occupied && line.valid && line.vid == vid) {
        line.valid = false;
        ++stats_.invalidated;
        emit({stats_.cycles, TraceEvent::Kind::invalidate, i, vid, cu});
      }
    }
    Line& line = lines_[target];
    line.vid = vid;
    line.payload = std::move(payload);
    line.valid = true;
    line.occupied = true;
    ++occupied_;
    ++stats_.submitted;
    emit({stats_.cycles, TraceEvent::Kind::submit, target, vid, cu});
    write_pointers_[cu] = (target + config_.n_cu) % config_.lines;
    return true;
  }

  void note_stall(std::size_t cu, VertexId vid) {
    ++stats_.stalls;
    emit({stats_.cycles, TraceEvent::Kind::stall, write_pointers_.at(cu), vid, cu});
  }

  // One cycle of the commit pointer.
  std::vector<Commit<Payload>> commit_cycle() {
    std::vector<Commit<Payload>> out;
    if (occupied_ == 0) return out;
    for (std::size_t k = 0; k < config_.scan_width; ++k) {
      Line& line = lines_[commit_pointer_];
      if (!line.occupied) break;
      if (line.valid) {
        emit({stats_.cycles, TraceEvent::Kind::commit, commit_pointer_, line.vid, 0});
        out.push_back({line.vid, std::move(line.payload)});
        ++stats_.committed;
      } else {
        emit({stats_.cycles, TraceEvent::Kind::skip, commit_pointer_, line.vid, 0});
      }
      line = Line{};
      --occupied_;
      commit_pointer_ = (commit_pointer_ + 1) % config_.lines;
    }
    ++stats_.cycles;
    return out;
  }

  struct DrainResult {
    std::vector<Commit<Payload>> commits;
    std::uint64_t cycles = 0;
  };

  DrainResult drain() {
    DrainResult result;
    while (occupied_ > 0) {
      auto batch = commit_cycle();
      ++result.cycles;
      for (auto& c : batch) result.commits.push_back(std::move(c));
    }
    return result;
  }

 private:
  struct Line {
    VertexId vid = 0;
    Payload payload{};
    bool valid = false;
    bool occupied = false;
  };

  void emit(const TraceEvent& e) const {
    if (sink_) sink_(e);
  }

  UpdaterConfig config_;
  std::vector<Line> lines_;
  std::vector<std::size_t> write_pointers_;
  std::size_t commit_pointer_ = 0;
  std::size_t occupied_ = 0;
  UpdaterStats stats_;
  Sink sink_;
};

template <class Payload>
struct Submission {
  VertexId vid = 0;
  Payload payload;
};

// Feeds submissions in round-robin arrival order (submission j goes to CU
// j mod n_cu) with the cycle schedule used by the engine: each cycle the CUs
// offer their next submissions in order, a stalled CU blocks the ones behind
// it, then the commit pointer runs once. `on_commit` sees every commit in
// commit order.
template <class Payload>
UpdaterStats run_round_robin(Updater<Payload>& updater, std::vector<Submission<Payload>> items,
                             const std::function<void(Commit<Payload>&)>& on_commit) {
  const UpdaterStats before = updater.stats();
  const std::size_t n_cu = updater.config().n_cu;
  std::size_t next = 0;
  while (next < items.size()) {
    for (std::size_t k = 0; k < n_cu && next < items.size(); ++k) {
      const std::size_t cu = next % n_cu;
      if (!updater.can_submit(cu)) {
        updater.note_stall(cu, items[next].vid);
        break;
      }
      updater.try_submit(cu, items[next].vid, std::move(items[next].payload));
      ++next;
    }
    for (auto& c : updater.commit_cycle()) on_commit(c);
  }
  auto drained = updater.drain();
  for (auto& c : drained.commits) on_commit(c);
  UpdaterStats delta = updater.stats();
  delta.cycles -= before.cycles;
  delta.submitted -= before.submitted;
  delta.committed -= before.committed;
  delta.invalidated -= before.invalidated;
  delta.stalls -= before.stalls;
  return delta;
}

}  // namespace tgnn
