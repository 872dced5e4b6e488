#include "tgnn/graph_store.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace tgnn {

NeighborRing::NeighborRing(std::size_t capacity) : slots_(capacity) {}

void NeighborRing::push(const NeighborRecord& rec) {
  if (slots_.empty()) return;
  if (size_ < slots_.size()) {
    slots_[(head_ + size_) % slots_.size()] = rec;
    ++size_;
  } else {
    slots_[head_] = rec;
    head_ = (head_ + 1) % slots_.size();
  }
}

const NeighborRecord& NeighborRing::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("neighbor ring index");
  return slots_[(head_ + i) % slots_.size()];
}

std::vector<NeighborRecord> NeighborRing::records() const {
  std::vector<NeighborRecord> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(at(i));
  return out;
}

GraphStore::GraphStore(StoreDims dims) : dims_(dims) {
  if (dims_.mr == 0) throw ConfigError("neighbor ring capacity mr must be positive");
}

MemoryEntry GraphStore::read_memory(VertexId v) const {
  if (auto it = memory_.find(v); it != memory_.end()) return it->second;
  return MemoryEntry{Vec(dims_.d_mem, 0.0), 0.0};
}

void GraphStore::write_memory(VertexId v, MemoryEntry entry) {
  if (entry.memory.size() != dims_.d_mem) {
    throw ConfigError("memory write for vertex " + std::to_string(v) + " has length " +
                      std::to_string(entry.memory.size()) + ", expected " +
                      std::to_string(dims_.d_mem));
  }
  auto it = memory_.find(v);
  if (it != memory_.end() && entry.last_update < it->second.last_update) {
    throw StreamOrderError("memory write for vertex " + std::to_string(v) +
                           " would move last_update backwards");
  }
  memory_[v] = std::move(entry);
}

MailboxEntry GraphStore::read_mailbox(VertexId v) const {
  if (auto it = mailbox_.find(v); it != mailbox_.end()) return it->second;
  return MailboxEntry{};
}

void GraphStore::write_mailbox(VertexId v, MailboxEntry entry) {
  if (entry.present && entry.raw_message.size() != dims_.raw_message_len()) {
    throw ConfigError("mailbox write for vertex " + std::to_string(v) + " has length " +
                      std::to_string(entry.raw_message.size()) + ", expected " +
                      std::to_string(dims_.raw_message_len()));
  }
  mailbox_[v] = std::move(entry);
}

std::vector<NeighborSlot> GraphStore::get_recent_neighbors(VertexId v, std::size_t n) const {
  if (n > dims_.mr) {
    throw PreconditionError("requested " + std::to_string(n) + " neighbors from a ring of " +
                            std::to_string(dims_.mr));
  }
  std::vector<NeighborSlot> out(n);
  auto it = neighbors_.find(v);
  if (it == neighbors_.end()) return out;
  const NeighborRing& ring = it->second;
  const std::size_t take = std::min(n, ring.size());
  const std::size_t pad = n - take;
  for (std::size_t i = 0; i < take; ++i) {
    out[pad + i] = NeighborSlot{ring.at(ring.size() - take + i), false};
  }
  return out;
}

void GraphStore::update_neighbor(VertexId v, const NeighborRecord& rec) {
  auto [it, inserted] = neighbors_.try_emplace(v, NeighborRing(dims_.mr));
  NeighborRing& ring = it->second;
  if (ring.size() > 0 && rec.timestamp < ring.newest().timestamp) {
    throw StreamOrderError("neighbor record for vertex " + std::to_string(v) +
                           " is older than the newest stored record");
  }
  ring.push(rec);
}

NeighborRing GraphStore::ring(VertexId v) const {
  if (auto it = neighbors_.find(v); it != neighbors_.end()) return it->second;
  return NeighborRing(dims_.mr);
}

void GraphStore::write_ring(VertexId v, NeighborRing ring) {
  if (ring.capacity() != dims_.mr) throw ConfigError("neighbor ring capacity mismatch");
  neighbors_.insert_or_assign(v, std::move(ring));
}

Vec GraphStore::vertex_features(VertexId v) const {
  if (auto it = vertex_features_.find(v); it != vertex_features_.end()) return it->second;
  return Vec(dims_.d_feat, 0.0);
}

void GraphStore::set_vertex_features(VertexId v, Vec features) {
  if (features.size() != dims_.d_feat) {
    throw ConfigError("vertex feature length " + std::to_string(features.size()) +
                      " does not match d_feat " + std::to_string(dims_.d_feat));
  }
  vertex_features_[v] = std::move(features);
}

Vec GraphStore::edge_features(EdgeId e) const {
  if (auto it = edge_features_.find(e); it != edge_features_.end()) return it->second;
  return Vec(dims_.d_edge, 0.0);
}

void GraphStore::set_edge_features(EdgeId e, Vec features) {
  if (features.size() != dims_.d_edge) {
    throw ConfigError("edge feature length " + std::to_string(features.size()) +
                      " does not match d_edge " + std::to_string(dims_.d_edge));
  }
  edge_features_[e] = std::move(features);
}

std::vector<VertexId> GraphStore::known_vertices() const {
  std::set<VertexId> ids;
  for (const auto& [v, _] : memory_) ids.insert(v);
  for (const auto& [v, _] : mailbox_) ids.insert(v);
  for (const auto& [v, _] : neighbors_) ids.insert(v);
  return {ids.begin(), ids.end()};
}

bool GraphStore::operator==(const GraphStore& other) const {
  return memory_ == other.memory_ && mailbox_ == other.mailbox_ &&
         neighbors_ == other.neighbors_ && vertex_features_ == other.vertex_features_ &&
         edge_features_ == other.edge_features_;
}

}  // namespace tgnn
