#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "tgnn/updater_sim.hpp"

using namespace tgnn;

namespace {

struct Recorder {
  std::vector<TraceEvent> events;
  Updater<int>::Sink sink() {
    return [this](const TraceEvent& e) { events.push_back(e); };
  }
};

}  // namespace

TEST_CASE("distinct vids fill consecutive lines") {
  Updater<int> u({8, 1, 3});
  for (VertexId v : {10u, 11u, 12u}) CHECK(u.try_submit(0, v, static_cast<int>(v)));
  CHECK(u.occupied() == 3);
  CHECK(u.write_pointer(0) == 3);
  const auto commits = u.commit_cycle();
  REQUIRE(commits.size() == 3);
  CHECK(commits[0].vid == 10);
  CHECK(commits[2].vid == 12);
  CHECK(u.commit_pointer() == 3);
  CHECK(u.empty());
}

TEST_CASE("a later write invalidates the uncommitted one") {
  Recorder rec;
  Updater<int> u({8, 1, 3}, rec.sink());
  u.try_submit(0, 1, 100);
  u.try_submit(0, 2, 200);
  u.try_submit(0, 1, 101);
  CHECK(u.stats().invalidated == 1);
  const auto commits = u.commit_cycle();
  REQUIRE(commits.size() == 2);
  CHECK(commits[0].vid == 2);
  CHECK(commits[1].vid == 1);
  CHECK(commits[1].payload == 101);
  std::size_t skips = 0;
  for (const auto& e : rec.events) skips += e.kind == TraceEvent::Kind::skip ? 1 : 0;
  CHECK(skips == 1);
}

TEST_CASE("commit cycle on an empty cache") {
  Updater<int> u({8, 2, 3});
  CHECK(u.commit_cycle().empty());
  CHECK(u.commit_pointer() == 0);
  const auto d = u.drain();
  CHECK(d.commits.empty());
  CHECK(d.cycles == 0);
}

TEST_CASE("drain takes ceil(k / scan) cycles") {
  for (std::size_t k = 1; k <= 16; ++k) {
    Updater<int> u({16, 1, 3});
    for (std::size_t i = 0; i < k; ++i) u.try_submit(0, i, 0);
    const auto d = u.drain();
    CHECK(d.commits.size() == k);
    CHECK(d.cycles == (k + 2) / 3);
  }
}

TEST_CASE("full ring stalls until the commit pointer frees the line") {
  Updater<int> u({4, 2, 1});
  for (VertexId v = 0; v < 4; ++v) CHECK(u.try_submit(v % 2, v, 0));
  CHECK_FALSE(u.can_submit(0));
  CHECK_FALSE(u.try_submit(0, 9, 0));
  CHECK(u.stats().stalls == 1);
  u.commit_cycle();
  CHECK(u.can_submit(0));
  CHECK_FALSE(u.can_submit(1));
}

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(Updater<int>({6, 4, 3}), ConfigError);
  CHECK_THROWS_AS(Updater<int>({0, 1, 3}), ConfigError);
  Updater<int> u({4, 2, 1});
  CHECK_THROWS_AS(u.try_submit(2, 0, 0), PreconditionError);
}

TEST_CASE("trace events round-trip through their text form") {
  const TraceEvent e{12, TraceEvent::Kind::stall, 5, 77, 1};
  const TraceEvent back = parse_trace_event(format_trace_event(e));
  CHECK(back.cycle == 12);
  CHECK(back.kind == TraceEvent::Kind::stall);
  CHECK(back.line == 5);
  CHECK(back.vid == 77);
  CHECK(back.cu == 1);
  CHECK_THROWS(parse_trace_event(R"({"cycle":1,"event":"bogus","line":0,"vid":0})"));
}

TEST_CASE("random traces match the sequential round-robin oracle") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n_cu = std::size_t{1} << (trial % 3);
    Recorder rec;
    Updater<int> u({64, n_cu, 3}, rec.sink());
    const std::size_t count = 1 + rng() % 400;
    const VertexId vids = 1 + rng() % 40;
    std::vector<Submission<int>> items;
    std::map<VertexId, int> oracle;
    for (std::size_t i = 0; i < count; ++i) {
      const VertexId v = rng() % vids;
      items.push_back({v, static_cast<int>(i)});
      oracle[v] = static_cast<int>(i);
    }
    std::map<VertexId, int> state;
    std::map<VertexId, int> last_seen;
    bool ordered = true;
    const UpdaterStats stats = run_round_robin<int>(u, items, [&](Commit<int>& c) {
      if (last_seen.count(c.vid) && last_seen[c.vid] >= c.payload) ordered = false;
      last_seen[c.vid] = c.payload;
      state[c.vid] = c.payload;
    });
    CHECK(state == oracle);
    CHECK(ordered);
    CHECK(stats.submitted == count);
    CHECK(stats.committed + stats.invalidated == count);
    std::map<std::uint64_t, std::size_t> per_cycle;
    for (const auto& e : rec.events) {
      if (e.kind == TraceEvent::Kind::commit) ++per_cycle[e.cycle];
    }
    for (const auto& [cycle, n] : per_cycle) CHECK(n <= 3);
  }
}
