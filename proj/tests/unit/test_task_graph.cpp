#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "minipic/task_graph.hpp"
#include "minipic/trace.hpp"
#include "minipic/worker_pool.hpp"

using namespace minipic;

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

std::set<Edge> edge_set(const TaskGraph& g) { return {g.edges().begin(), g.edges().end()}; }

DepTag x_tag() { return tag(TagKind::User, 0); }

TaskBody noop() {
  return [](TaskContext&) {};
}

/// Offline reference for the in/out rules over a flat submission list.
std::set<Edge> reference_edges(const std::vector<std::vector<Dep>>& tasks) {
  std::set<Edge> edges;
  for (std::size_t b = 0; b < tasks.size(); ++b) {
    for (const Dep& db : tasks[b]) {
      bool out_b = false;
      for (const Dep& d : tasks[b]) out_b |= d.tag == db.tag && d.access == Access::Out;
      // scan back to the last writer of the tag
      for (std::size_t a = b; a-- > 0;) {
        bool touches = false, writes = false;
        for (const Dep& da : tasks[a]) {
          if (da.tag != db.tag) continue;
          touches = true;
          writes |= da.access == Access::Out;
        }
        if (!touches) continue;
        if (writes) {
          edges.insert({a, b});
          break;
        }
        if (out_b) edges.insert({a, b});
      }
    }
  }
  return edges;
}

struct Interval {
  std::int64_t start, end;
};

}  // namespace

TEST_CASE("out then in orders A before B") {
  TaskGraph g;
  g.submit({}, {out(x_tag())}, noop());
  g.submit({}, {in(x_tag())}, noop());
  CHECK(edge_set(g) == std::set<Edge>{{0, 1}});
}

TEST_CASE("in then in has no edge") {
  TaskGraph g;
  g.submit({}, {in(x_tag())}, noop());
  g.submit({}, {in(x_tag())}, noop());
  CHECK(g.edges().empty());
}

TEST_CASE("out then out serializes") {
  TaskGraph g;
  g.submit({}, {out(x_tag())}, noop());
  g.submit({}, {out(x_tag())}, noop());
  CHECK(edge_set(g) == std::set<Edge>{{0, 1}});
}

TEST_CASE("out waits for every reader since the last writer") {
  TaskGraph g;
  g.submit({}, {out(x_tag())}, noop());
  g.submit({}, {in(x_tag())}, noop());
  g.submit({}, {in(x_tag())}, noop());
  g.submit({}, {out(x_tag())}, noop());
  g.submit({}, {in(x_tag())}, noop());
  CHECK(edge_set(g) == std::set<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}, {3, 4}});
}

TEST_CASE("distinct tag indices are independent") {
  TaskGraph g;
  g.submit({}, {out(tag(TagKind::HasPushed, 0))}, noop());
  g.submit({}, {in(tag(TagKind::HasPushed, 1))}, noop());
  g.submit({}, {in(tag(TagKind::HasDoneBC, 0))}, noop());
  CHECK(g.edges().empty());
}

TEST_CASE("a tag listed as both in and out acts as out") {
  TaskGraph g;
  g.submit({}, {in(x_tag())}, noop());
  g.submit({}, {in(x_tag()), out(x_tag())}, noop());
  g.submit({}, {in(x_tag())}, noop());
  CHECK(edge_set(g) == std::set<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("chain executes in submission order on any worker count") {
  for (int workers : {1, 2, 4, 8}) {
    WorkerPool pool(workers);
    TaskGraph g;
    std::vector<int> order;
    std::mutex m;
    for (int k = 0; k < 200; ++k)
      g.submit({}, {out(x_tag())}, [&, k](TaskContext&) {
        std::lock_guard lk(m);
        order.push_back(k);
      });
    g.execute(pool);
    std::vector<int> expect(200);
    for (int k = 0; k < 200; ++k) expect[k] = k;
    CHECK(order == expect);
  }
}

TEST_CASE("one worker runs a topological order consistent with submission") {
  WorkerPool pool(1);
  TaskGraph g;
  std::vector<int> order;
  for (int k = 0; k < 20; ++k)
    g.submit({}, {k % 3 == 0 ? out(tag(TagKind::User, k % 2)) : in(tag(TagKind::User, k % 2))},
             [&order, k](TaskContext&) { order.push_back(k); });
  g.execute(pool);
  REQUIRE(order.size() == 20);
  std::vector<std::size_t> pos(20);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [a, b] : g.edges()) CHECK(pos[a] < pos[b]);
}

TEST_CASE("random graphs respect every derived edge and run each task once") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 300;
    const int alphabet = 1 + static_cast<int>(rng() % 20);
    std::vector<std::vector<Dep>> specs(n);
    for (auto& deps : specs) {
      const int k = static_cast<int>(rng() % 4);
      for (int d = 0; d < k; ++d) {
        const DepTag t = tag(TagKind::User, static_cast<int>(rng() % alphabet));
        deps.push_back(rng() % 2 ? in(t) : out(t));
      }
    }
    WorkerPool pool(1 + trial % 4);
    TaskGraph g;
    std::vector<std::atomic<int>> runs(n);
    std::vector<Interval> when(n);
    for (int t = 0; t < n; ++t)
      g.submit({}, specs[t], [&, t](TaskContext&) {
        when[t].start = trace_clock_ns();
        runs[t].fetch_add(1);
        std::this_thread::yield();
        when[t].end = trace_clock_ns();
      });
    g.execute(pool);
    CHECK(edge_set(g) == reference_edges(specs));
    for (int t = 0; t < n; ++t) CHECK(runs[t].load() == 1);
    for (const auto& [a, b] : g.edges()) CHECK(when[a].end <= when[b].start);
    CHECK(g.executed_count() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("children resolve dependences among siblings and complete before the parent") {
  WorkerPool pool(3);
  TaskGraph g;
  std::atomic<int> children_done{0};
  int seen_by_successor = -1;
  std::vector<int> chain;
  std::mutex m;
  g.submit({OpKind::Dynamics, 0, 0, -1}, {out(tag(TagKind::HasDoneDynamics, 0, 0))}, [&](TaskContext& ctx) {
    for (int b = 0; b < 4; ++b) {
      ctx.spawn({OpKind::Interpolation, 0, 0, b}, {out(tag(TagKind::HasInterpolated, b))}, [&, b](TaskContext&) {
        std::lock_guard lk(m);
        chain.push_back(b * 10);
        ++children_done;
      });
      ctx.spawn({OpKind::Push, 0, 0, b}, {in(tag(TagKind::HasInterpolated, b))}, [&, b](TaskContext&) {
        std::lock_guard lk(m);
        chain.push_back(b * 10 + 1);
        ++children_done;
      });
    }
  });
  g.submit({OpKind::Reduction, 0, 0, -1}, {in(tag(TagKind::HasDoneDynamics, 0, 0))},
           [&](TaskContext&) { seen_by_successor = children_done.load(); });
  g.execute(pool);
  CHECK(seen_by_successor == 8);
  CHECK(g.size() == 10);
  CHECK(g.executed_count() == 10);
  for (int b = 0; b < 4; ++b) {
    const auto first = std::find(chain.begin(), chain.end(), b * 10);
    const auto second = std::find(chain.begin(), chain.end(), b * 10 + 1);
    CHECK(first < second);
  }
  const auto recs = g.records();
  for (const auto& r : recs) CHECK(r.executed);
  CHECK(recs[0].complete_ns <= recs[1].start_ns);
}

TEST_CASE("child tags are scoped to their parent") {
  WorkerPool pool(2);
  TaskGraph g;
  for (int parent = 0; parent < 2; ++parent)
    g.submit({}, {}, [](TaskContext& ctx) {
      ctx.spawn({}, {out(x_tag())}, noop());
      ctx.spawn({}, {in(x_tag())}, noop());
    });
  g.execute(pool);
  std::set<Edge> expect;
  // nodes: 0, 1 top level; children appended as spawned
  const auto recs = g.records();
  for (const auto& [a, b] : g.edges()) {
    CHECK(recs[a].parent == recs[b].parent);
    CHECK(recs[a].parent >= 0);
  }
  CHECK(g.edges().size() == 2);
}

TEST_CASE("derived edges are identical across runs and worker counts when keyed by path") {
  auto build = [](int workers) {
    WorkerPool pool(workers);
    TaskGraph g;
    for (int p = 0; p < 6; ++p) {
      g.submit({}, {out(tag(TagKind::HasDoneDynamics, p % 3))}, [](TaskContext& ctx) {
        for (int b = 0; b < 5; ++b) {
          ctx.spawn({}, {out(tag(TagKind::HasInterpolated, b))}, noop());
          ctx.spawn({}, {in(tag(TagKind::HasInterpolated, b)), out(tag(TagKind::HasPushed, b % 2))}, noop());
        }
      });
      g.submit({}, {in(tag(TagKind::HasDoneDynamics, p % 3)), out(tag(TagKind::HasReducedDensities, p % 2))},
               noop());
    }
    g.execute(pool);
    const auto recs = g.records();
    std::set<std::pair<std::vector<int>, std::vector<int>>> keyed;
    for (const auto& [a, b] : g.edges()) keyed.insert({recs[a].path, recs[b].path});
    return keyed;
  };
  const auto ref = build(1);
  CHECK(ref.size() > 20);
  for (int w : {1, 2, 4, 8}) CHECK(build(w) == ref);
}

TEST_CASE("submitting after execution raises UsageError") {
  WorkerPool pool(1);
  TaskGraph g;
  g.submit({}, {}, noop());
  g.execute(pool);
  CHECK_THROWS_AS(g.submit({}, {}, noop()), UsageError);
  CHECK_THROWS_AS(g.execute(pool), UsageError);
}

TEST_CASE("a failing body aborts execution and reports its meta") {
  WorkerPool pool(2);
  TaskGraph g;
  std::atomic<bool> successor_ran{false};
  g.submit({OpKind::Push, 3, 1, 7}, {out(x_tag())}, [](TaskContext&) { throw std::runtime_error("boom"); });
  g.submit({}, {in(x_tag())}, [&](TaskContext&) { successor_ran = true; });
  try {
    g.execute(pool);
    FAIL("expected TaskFailure");
  } catch (const TaskFailure& e) {
    CHECK(e.meta().op == OpKind::Push);
    CHECK(e.meta().ipatch == 3);
    CHECK(e.meta().ispec == 1);
    CHECK(e.meta().ibin == 7);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
    CHECK(std::string(e.what()).find("ipatch=3") != std::string::npos);
  }
  CHECK_FALSE(successor_ran.load());
}

TEST_CASE("an empty graph executes immediately") {
  WorkerPool pool(2);
  TaskGraph g;
  CHECK_NOTHROW(g.execute(pool));
  CHECK(g.executed_count() == 0);
}

TEST_CASE("tracing emits one event per executed task with disjoint intervals per worker") {
  WorkerPool pool(4);
  Tracer tracer(1, 4);
  TaskGraph g;
  for (int k = 0; k < 50; ++k)
    g.submit({OpKind::Projection, k, 0, k % 3}, {in(x_tag())}, [](TaskContext& ctx) {
      ctx.spawn({OpKind::Push, -1, 0, 0}, {}, noop());
    });
  g.execute(pool, &tracer, 0);
  const auto events = tracer.merged();
  CHECK(events.size() == g.executed_count());
  CHECK(events.size() == 100);
  for (int w = 0; w < 4; ++w) {
    std::vector<TraceEvent> mine;
    for (const auto& e : events)
      if (e.tid == w) mine.push_back(e);
    for (std::size_t k = 1; k < mine.size(); ++k) CHECK(mine[k - 1].end_ns <= mine[k].start_ns);
  }
  for (std::size_t k = 1; k < events.size(); ++k) CHECK(events[k - 1].start_ns <= events[k].start_ns);
}

TEST_CASE("busy timers accumulate body time per worker and op kind") {
  WorkerPool pool(3);
  Tracer tracer(1, 3);
  std::vector<OpSeconds> busy(3, OpSeconds{});
  TaskGraph g;
  for (int k = 0; k < 30; ++k)
    g.submit({k % 2 ? OpKind::Push : OpKind::Projection, k, 0, 0}, {}, [](TaskContext&) {
      volatile double sink = 0;
      for (int j = 0; j < 1000; ++j) sink = sink + j;
    });
  g.execute(pool, &tracer, 0, &busy);
  std::vector<OpSeconds> expect(3, OpSeconds{});
  for (const auto& e : tracer.merged())
    expect[e.tid][static_cast<int>(e.op)] += static_cast<double>(e.end_ns - e.start_ns) * 1e-9;
  for (int w = 0; w < 3; ++w)
    for (int k = 0; k < kOpKinds; ++k) CHECK(busy[w][k] == doctest::Approx(expect[w][k]).epsilon(1e-12));

  TaskGraph small;
  small.submit({}, {}, noop());
  std::vector<OpSeconds> too_few(2, OpSeconds{});
  CHECK_THROWS_AS(small.execute(pool, nullptr, 0, &too_few), UsageError);
}

TEST_CASE("disabled tracer records nothing") {
  Tracer t;
  CHECK_FALSE(t.enabled());
  CHECK(t.size() == 0);
  CHECK(t.merged().empty());
}

TEST_CASE("worker pool propagates exceptions and stays usable") {
  WorkerPool pool(3);
  std::atomic<int> hits{0};
  CHECK_THROWS_AS(pool.run([](int w) {
    if (w == 1) throw std::logic_error("x");
  }),
                  std::logic_error);
  pool.run([&](int) { ++hits; });
  CHECK(hits == 3);
  CHECK_THROWS_AS(WorkerPool(0), std::invalid_argument);
}
