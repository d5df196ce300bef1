#include "doctest.h"

#include <algorithm>
#include <map>
#include <vector>

#include "atlas/executor.hpp"
#include "atlas/rng.hpp"

using namespace atlas;

namespace {

Command cmd_for(Dot d) {
  return Command::put("k", to_string(d), d.proc, d.seq);
}

std::vector<Dot> flatten(const std::vector<std::vector<LogEntry>>& batches) {
  std::vector<Dot> out;
  for (const auto& b : batches)
    for (const LogEntry& e : b) out.push_back(e.dot);
  return out;
}

}  // namespace

TEST_CASE("a chain executes dependencies first, one batch each") {
  ExecGraph g;
  Dot a{1, 1}, b{2, 1}, c{3, 1};
  g.add_committed(c, cmd_for(c), {b});
  CHECK(g.try_execute().empty());  // b not even committed yet
  CHECK(g.missing_deps() == DotSet{b});
  g.add_committed(b, cmd_for(b), {a});
  CHECK(g.try_execute().empty());
  CHECK(g.missing_deps() == DotSet{a});
  g.add_committed(a, cmd_for(a), {});

  auto batches = g.try_execute();
  REQUIRE(batches.size() == 3);
  CHECK(flatten(batches) == std::vector<Dot>{a, b, c});
  CHECK(batches[0][0].batch == 0);
  CHECK(batches[1][0].batch == 1);
  CHECK(batches[2][0].batch == 2);
  CHECK(g.executed(a));
  CHECK(g.executed(c));
  CHECK(g.pending() == 0);
  CHECK(g.batch_count() == 3);
  CHECK(g.log().size() == 3);
}

TEST_CASE("mutual dependencies run as one batch in dot order") {
  ExecGraph g;
  Dot a{1, 1}, b{5, 1};  // same seq: a sorts first by process id
  g.add_committed(b, cmd_for(b), {a});
  CHECK(g.try_execute().empty());
  g.add_committed(a, cmd_for(a), {b});

  auto batches = g.try_execute();
  REQUIRE(batches.size() == 1);
  REQUIRE(batches[0].size() == 2);
  CHECK(batches[0][0].dot == a);
  CHECK(batches[0][1].dot == b);
  CHECK(batches[0][0].batch == 0);
  CHECK(batches[0][1].batch == 0);
}

TEST_CASE("diamond: independent middle dots get separate batches") {
  ExecGraph g;
  Dot a{1, 1}, b{2, 1}, c{3, 1}, d{4, 1};
  g.add_committed(d, cmd_for(d), {b, c});
  g.add_committed(b, cmd_for(b), {a});
  g.add_committed(c, cmd_for(c), {a});
  g.add_committed(a, cmd_for(a), {});

  auto batches = g.try_execute();
  REQUIRE(batches.size() == 4);
  CHECK(flatten(batches) == std::vector<Dot>{a, b, c, d});
  for (const auto& batch : batches) CHECK(batch.size() == 1);
}

TEST_CASE("a blocked component poisons everything above it") {
  ExecGraph g;
  Dot x{1, 1}, y{2, 1}, z{3, 1};
  g.add_committed(x, cmd_for(x), {z});
  g.add_committed(y, cmd_for(y), {x});
  CHECK(g.try_execute().empty());
  CHECK(g.missing_deps() == DotSet{z});

  g.add_committed(z, Command::noop(), {});
  auto batches = g.try_execute();
  REQUIRE(batches.size() == 3);
  CHECK(flatten(batches) == std::vector<Dot>{z, x, y});
  CHECK(batches[0][0].cmd.is_noop());  // noops flow through the log
}

TEST_CASE("duplicate commits are rejected, pending or executed") {
  ExecGraph g;
  Dot a{1, 1}, b{2, 1};
  g.add_committed(b, cmd_for(b), {a});
  CHECK_THROWS_AS(g.add_committed(b, cmd_for(b), {}), std::logic_error);
  g.add_committed(a, cmd_for(a), {});
  g.try_execute();
  REQUIRE(g.executed(a));
  CHECK_THROWS_AS(g.add_committed(a, cmd_for(a), {}), std::logic_error);
}

namespace {

struct RandomGraph {
  std::vector<Dot> dots;
  std::map<Dot, DotSet> deps;
};

RandomGraph make_graph(Rng& rng, std::size_t size) {
  RandomGraph g;
  for (std::size_t i = 0; i < size; i++)
    g.dots.push_back({ProcId(1 + rng.below(3)), 1 + rng.below(4)});
  std::sort(g.dots.begin(), g.dots.end());
  g.dots.erase(std::unique(g.dots.begin(), g.dots.end()), g.dots.end());
  for (const Dot& d : g.dots) {
    DotSet ds;
    for (const Dot& e : g.dots)
      if (!(e == d) && rng.below(3) == 0) ds.insert(e);
    g.deps[d] = ds;
  }
  return g;
}

// Reference semantics: a batch must be a minimal nonempty pending set closed
// under dependencies modulo what already ran.
void check_batches_minimal(const RandomGraph& g,
                           const std::vector<std::vector<LogEntry>>& batches,
                           DotSet& done, DotSet& pending) {
  for (const auto& batch : batches) {
    REQUIRE(!batch.empty());
    std::vector<Dot> members;
    for (const LogEntry& e : batch) members.push_back(e.dot);
    CHECK(std::is_sorted(members.begin(), members.end()));

    DotSet mset(members.begin(), members.end());
    for (const Dot& d : members) {
      REQUIRE(pending.count(d));
      for (const Dot& dep : g.deps.at(d))
        CHECK((mset.count(dep) || done.count(dep)));  // closed
    }
    // no proper nonempty subset is closed
    const std::size_t k = members.size();
    REQUIRE(k <= 6);
    for (std::size_t mask = 1; mask + 1 < (std::size_t(1) << k); mask++) {
      bool closed = true;
      DotSet sub;
      for (std::size_t i = 0; i < k; i++)
        if (mask & (std::size_t(1) << i)) sub.insert(members[i]);
      for (const Dot& d : sub)
        for (const Dot& dep : g.deps.at(d))
          if (mset.count(dep) && !sub.count(dep) && !done.count(dep))
            closed = false;
      CHECK(!closed);
    }
    for (const Dot& d : members) {
      done.insert(d);
      pending.erase(d);
    }
  }
}

}  // namespace

TEST_CASE("random graphs: batches are minimal dependency-closed sets") {
  Rng rng(0xba7c4);
  for (int round = 0; round < 200; round++) {
    RandomGraph g = make_graph(rng, 2 + rng.below(5));
    ExecGraph exec;
    DotSet done, pending;

    std::vector<Dot> order = g.dots;
    for (std::size_t i = order.size(); i > 1; i--)
      std::swap(order[i - 1], order[rng.below(i)]);

    for (const Dot& d : order) {
      exec.add_committed(d, cmd_for(d), g.deps.at(d));
      pending.insert(d);
      check_batches_minimal(g, exec.try_execute(), done, pending);
    }
    // everything was committed, so everything must run
    CHECK(pending.empty());
    CHECK(exec.pending() == 0);
    CHECK(exec.log().size() == g.dots.size());
  }
}

TEST_CASE("random graphs: batch membership is arrival-order independent") {
  Rng rng(0x0dd5);
  for (int round = 0; round < 100; round++) {
    RandomGraph g = make_graph(rng, 2 + rng.below(5));

    auto run = [&](Rng& order_rng) {
      ExecGraph exec;
      std::map<Dot, DotSet> batch_of;
      std::vector<Dot> order = g.dots;
      for (std::size_t i = order.size(); i > 1; i--)
        std::swap(order[i - 1], order[order_rng.below(i)]);
      for (const Dot& d : order) {
        exec.add_committed(d, cmd_for(d), g.deps.at(d));
        for (const auto& batch : exec.try_execute()) {
          DotSet members;
          for (const LogEntry& e : batch) members.insert(e.dot);
          for (const Dot& m : members) batch_of[m] = members;
        }
      }
      return batch_of;
    };

    Rng r1(round), r2(round + 1000), r3(round + 2000);
    auto b1 = run(r1);
    CHECK(b1 == run(r2));
    CHECK(b1 == run(r3));
  }
}
