#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tgnn/types.hpp"

namespace tgnn {

// Cached raw message: s_self || s_other || f_e, no time encoding. The time
// difference is taken at consumption against msg_timestamp.
struct MailboxEntry {
  Vec raw_message;
  Timestamp msg_timestamp = 0.0;
  bool present = false;

  bool operator==(const MailboxEntry&) const = default;
};

struct MemoryEntry {
  Vec memory;
  Timestamp last_update = 0.0;

  bool operator==(const MemoryEntry&) const = default;
};

struct NeighborRecord {
  VertexId nbr = 0;
  EdgeId edge_id = 0;
  Timestamp timestamp = 0.0;

  bool operator==(const NeighborRecord&) const = default;
};

// One slot of a fixed-length neighbor list. Masked slots are padding.
struct NeighborSlot {
  NeighborRecord record;
  bool masked = true;
};

// Fixed-capacity FIFO of the most recent neighbors of one vertex.
class NeighborRing {
 public:
  NeighborRing() = default;
  explicit NeighborRing(std::size_t capacity);

  void push(const NeighborRecord& rec);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return slots_.size(); }

  // i = 0 is the oldest stored record.
  const NeighborRecord& at(std::size_t i) const;
  const NeighborRecord& newest() const { return at(size_ - 1); }

  // Oldest-first copy of the stored records.
  std::vector<NeighborRecord> records() const;

  bool operator==(const NeighborRing& other) const { return records() == other.records(); }

 private:
  std::vector<NeighborRecord> slots_;
  std::size_t head_ = 0;  // index of the oldest record
  std::size_t size_ = 0;
};

struct StoreDims {
  std::size_t d_mem = 0;
  std::size_t d_edge = 0;
  std::size_t d_feat = 0;
  std::size_t mr = 10;

  std::size_t raw_message_len() const { return 2 * d_mem + d_edge; }
};

// Vertex mailbox, vertex memory table, vertex neighbor table and the static
// feature stores. Unseen vertices read as cold start: zero memory with
// last_update 0, absent mailbox, empty neighbor ring, zero features.
class GraphStore {
 public:
  explicit GraphStore(StoreDims dims);

  const StoreDims& dims() const { return dims_; }

  MemoryEntry read_memory(VertexId v) const;
  // Throws StreamOrderError when `last_update` is older than the stored one.
  void write_memory(VertexId v, MemoryEntry entry);

  MailboxEntry read_mailbox(VertexId v) const;
  void write_mailbox(VertexId v, MailboxEntry entry);

  // Returns n slots, oldest first; padding (masked) slots lead.
  std::vector<NeighborSlot> get_recent_neighbors(VertexId v, std::size_t n) const;
  // Throws StreamOrderError when rec is older than the newest stored record.
  void update_neighbor(VertexId v, const NeighborRecord& rec);
  NeighborRing ring(VertexId v) const;
  void write_ring(VertexId v, NeighborRing ring);

  Vec vertex_features(VertexId v) const;
  void set_vertex_features(VertexId v, Vec features);

  Vec edge_features(EdgeId e) const;
  void set_edge_features(EdgeId e, Vec features);

  // Sorted ids of every vertex with stored memory, mailbox or neighbors.
  std::vector<VertexId> known_vertices() const;

  bool operator==(const GraphStore& other) const;

 private:
  StoreDims dims_;
  std::unordered_map<VertexId, MemoryEntry> memory_;
  std::unordered_map<VertexId, MailboxEntry> mailbox_;
  std::unordered_map<VertexId, NeighborRing> neighbors_;
  std::unordered_map<VertexId, Vec> vertex_features_;
  std::unordered_map<EdgeId, Vec> edge_features_;
};

}  // namespace tgnn
