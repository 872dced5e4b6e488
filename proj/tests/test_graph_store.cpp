#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "oracle/reference.hpp"
#include "tgnn/graph_store.hpp"
#include "tgnn/linalg.hpp"

using namespace tgnn;

TEST_CASE("matrix construction checks the element count") {
  CHECK_THROWS_AS(Matrix(2, 3, std::vector<double>(5)), ConfigError);
  const Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(m(1, 0) == 4);
  const Matrix block = m.column_block(1, 2);
  CHECK(block == Matrix(2, 2, {2, 3, 5, 6}));
}

TEST_CASE("matvec counts rows times columns") {
  const Matrix m(3, 4, 1.0);
  OpCounter ops;
  const Vec y = matvec(m, Vec{1, 2, 3, 4}, &ops);
  CHECK(y == Vec{10, 10, 10});
  CHECK(ops.mac == 12);
}

TEST_CASE("neighbor ring") {
  SUBCASE("one insert into an empty ring") {
    NeighborRing ring(3);
    ring.push({7, 1, 2.0});
    REQUIRE(ring.size() == 1);
    CHECK(ring.newest() == NeighborRecord{7, 1, 2.0});
  }
  SUBCASE("full ring evicts the oldest") {
    NeighborRing ring(2);
    ring.push({1, 1, 1.0});
    ring.push({2, 2, 2.0});
    ring.push({3, 3, 3.0});
    const auto recs = ring.records();
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].timestamp == 2.0);
    CHECK(recs[1].timestamp == 3.0);
  }
}

TEST_CASE("cold start reads") {
  GraphStore store({3, 2, 1, 4});
  const MemoryEntry m = store.read_memory(42);
  CHECK(m.memory == Vec(3, 0.0));
  CHECK(m.last_update == 0.0);
  CHECK_FALSE(store.read_mailbox(42).present);
  const auto slots = store.get_recent_neighbors(42, 4);
  REQUIRE(slots.size() == 4);
  for (const auto& s : slots) CHECK(s.masked);
  CHECK(store.vertex_features(42) == Vec(1, 0.0));
  CHECK(store.edge_features(9) == Vec(2, 0.0));
}

TEST_CASE("memory writes") {
  GraphStore store({2, 0, 0, 2});
  store.write_memory(1, {{0.25, -1.5}, 3.0});
  CHECK(store.read_memory(1) == MemoryEntry{{0.25, -1.5}, 3.0});
  CHECK_THROWS_AS(store.write_memory(1, {{1.0}, 4.0}), ConfigError);
  CHECK_THROWS_AS(store.write_memory(1, {{1.0, 1.0}, 2.0}), StreamOrderError);
  CHECK_THROWS_AS(store.write_mailbox(1, {{1.0}, 1.0, true}), ConfigError);
}

TEST_CASE("interleaved writes to 1000 vertices keep the last write per vertex") {
  std::mt19937_64 rng(11);
  GraphStore store({2, 0, 0, 2});
  std::map<VertexId, MemoryEntry> expected;
  std::uniform_int_distribution<VertexId> vid(0, 999);
  std::uniform_real_distribution<double> val(-1, 1);
  double t = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const VertexId v = vid(rng);
    t += 0.5;
    MemoryEntry e{{val(rng), val(rng)}, t};
    store.write_memory(v, e);
    expected[v] = e;
  }
  for (const auto& [v, e] : expected) CHECK(store.read_memory(v) == e);
}

TEST_CASE("recent neighbors match the suffix of a full interaction log") {
  std::mt19937_64 rng(5);
  const std::size_t mr = 6;
  GraphStore store({1, 0, 0, mr});
  ref::NeighborLog log;
  std::uniform_int_distribution<VertexId> vid(0, 30);
  double t = 0.0;
  for (EdgeId e = 0; e < 3000; ++e) {
    const VertexId u = vid(rng), w = vid(rng);
    t += 1.0;
    store.update_neighbor(u, {w, e, t});
    log.add(u, {w, e, t});
    if (e % 97 == 0) {
      for (VertexId v = 0; v <= 30; ++v) {
        for (std::size_t n = 1; n <= mr; ++n) {
          const auto slots = store.get_recent_neighbors(v, n);
          const auto expect = log.last(v, n);
          REQUIRE(slots.size() == n);
          const std::size_t pad = n - expect.size();
          for (std::size_t j = 0; j < n; ++j) {
            if (j < pad) {
              CHECK(slots[j].masked);
            } else {
              CHECK_FALSE(slots[j].masked);
              CHECK(slots[j].record.nbr == expect[j - pad].nbr);
              CHECK(slots[j].record.edge_id == expect[j - pad].edge);
              CHECK(slots[j].record.timestamp == expect[j - pad].t);
            }
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(store.get_recent_neighbors(0, mr + 1), PreconditionError);
  CHECK_THROWS_AS(store.update_neighbor(vid(rng) % 1, {1, 1, 0.0}), StreamOrderError);
}

TEST_CASE("known vertices are sorted") {
  GraphStore store({1, 0, 0, 2});
  store.update_neighbor(9, {1, 0, 1.0});
  store.write_memory(3, {{1.0}, 1.0});
  store.write_mailbox(5, {{1.0, 1.0}, 1.0, true});
  CHECK(store.known_vertices() == std::vector<VertexId>{3, 5, 9});
}
