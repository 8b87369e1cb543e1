#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "edge_kernels.hpp"
#include "sern/engine.hpp"
#include "sern/errors.hpp"
#include "support/stat_tests.hpp"

using namespace sern;
using namespace sern::testing;

namespace {

using EdgeList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

EdgeList sorted_edges(const EdgeStore& edges) {
  EdgeList out;
  for (std::size_t k = 0; k < edges.size(); ++k) out.emplace_back(edges.from[k], edges.to[k]);
  std::sort(out.begin(), out.end());
  return out;
}

bool structurally_valid(const EdgeStore& edges, std::uint32_t n) {
  const EdgeList sorted = sorted_edges(edges);
  for (const auto& [a, b] : sorted) {
    if (!(a < b && b < n)) return false;
  }
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

GenConfig waxman(std::uint64_t n, double q, double s, std::uint32_t m = 20) {
  GenConfig c;
  c.n = n;
  c.model.kind = DeterrenceKind::waxman;
  c.model.params = {.q = q, .s = s};
  c.grid_size = m;
  return c;
}

}  // namespace

TEST_CASE("empty graph") {
  GenConfig c = waxman(0, 0.5, 1);
  const GenResult r = generate(c);
  CHECK(r.nodes.size() == 0);
  CHECK(r.edges.size() == 0);
  CHECK(r.stats.edges == 0);
  c.workers = 4;
  CHECK(generate(c).edges.size() == 0);
}

TEST_CASE("invalid configurations fail before generating") {
  GenConfig c = waxman(10, 0.5, 1);
  c.n = kMaxNodes + 1;
  CHECK_THROWS_AS(generate(c), ParameterError);
  c = waxman(10, 0.5, 1);
  c.grid_size = 0;
  CHECK_THROWS_AS(generate(c), ParameterError);
  c = waxman(10, 0.5, 1);
  c.workers = 0;
  CHECK_THROWS_AS(generate(c), ParameterError);
  c = waxman(10, 0.5, 1);
  c.buffer = 0;
  CHECK_THROWS_AS(generate(c), ParameterError);
  c = waxman(10, 1.5, 1);
  CHECK_THROWS_AS(generate(c), ParameterError);
  c = waxman(200000, 0.5, 1);
  c.algorithm = Algorithm::naive;
  CHECK_THROWS_AS(generate(c), ParameterError);
}

TEST_CASE("single worker runs are bit-identical") {
  GenConfig c;
  c.n = 10000;
  c.model.kind = DeterrenceKind::ger;
  c.model.params.q = 0.001;
  c.algorithm = Algorithm::qjump;
  c.seed = 77;
  const GenResult a = generate(c);
  const GenResult b = generate(c);
  CHECK(a.nodes.x == b.nodes.x);
  CHECK(a.nodes.y == b.nodes.y);
  CHECK(a.edges.from == b.edges.from);
  CHECK(a.edges.to == b.edges.to);
  CHECK(a.edges.size() > 0);
  c.seed = 78;
  CHECK(generate(c).edges.from != a.edges.from);
}

TEST_CASE("engine matches the sequential entry points") {
  for (Algorithm algorithm : {Algorithm::naive, Algorithm::qjump, Algorithm::bucket}) {
    GenConfig c = waxman(1500, 0.7, 5, 9);
    c.algorithm = algorithm;
    c.seed = 5;
    const Generator g(c);
    const GenResult r = g.run();
    Mwc rng(derive_seed(5, Stream::edges, 0));
    EdgeStore direct;
    if (algorithm == Algorithm::naive) direct = generate_edges_naive(r.nodes, g.model(), rng);
    if (algorithm == Algorithm::qjump) direct = generate_edges_qjump(r.nodes, g.model(), rng);
    if (algorithm == Algorithm::bucket) direct = generate_edges_bucket(r.nodes, g.grid(), g.model(), g.q_table(), rng);
    CAPTURE(to_string(algorithm));
    CHECK(direct.from == r.edges.from);
    CHECK(direct.to == r.edges.to);
  }
}

TEST_CASE("sink: single worker, buffers of 10") {
  SharedEdgeSink sink(16, false);
  EdgeBuffer buffer(10, false);
  for (std::uint32_t k = 0; k < 70; ++k) buffer.push(k, k + 1, 0.0f, sink);
  buffer.flush(sink);
  const EdgeStore edges = sink.release();
  REQUIRE(edges.size() == 70);
  for (std::uint32_t k = 0; k < 70; ++k) {
    CHECK(edges.from[k] == k);
    CHECK(edges.to[k] == k + 1);
  }
}

TEST_CASE("sink: explicit reservation with distances") {
  SharedEdgeSink sink(2, true);
  const std::vector<std::uint32_t> from{1, 2, 3};
  const std::vector<std::uint32_t> to{4, 5, 6};
  const std::vector<float> d{0.5f, 0.25f, 0.125f};
  reserve_and_commit(sink, from, to, d);
  reserve_and_commit(sink, from, to, d);
  CHECK(sink.size() == 6);
  CHECK(sink.growth_events() >= 1);
  const EdgeStore edges = sink.release();
  CHECK(edges.distance == std::vector<float>{0.5f, 0.25f, 0.125f, 0.5f, 0.25f, 0.125f});
}

TEST_CASE("sink: growth keeps the committed prefix") {
  SharedEdgeSink sink(8, false);
  EdgeBuffer buffer(3, false);
  std::uint64_t checksum = 0;
  for (std::uint32_t k = 0; k < 8; ++k) {
    buffer.push(k, 1000 + k, 0.0f, sink);
  }
  buffer.flush(sink);
  for (std::uint32_t k = 0; k < 8; ++k) checksum = checksum * 1000003 + k * 7919 + (1000 + k);
  for (std::uint32_t k = 8; k < 5000; ++k) buffer.push(k, 1000 + k, 0.0f, sink);
  buffer.flush(sink);
  CHECK(sink.growth_events() > 3);
  const EdgeStore edges = sink.release();
  std::uint64_t after = 0;
  for (std::uint32_t k = 0; k < 8; ++k) after = after * 1000003 + edges.from[k] * 7919 + edges.to[k];
  CHECK(after == checksum);
  CHECK(edges.size() == 5000);
}

TEST_CASE("sink: four workers commit the union of their edges") {
  for (std::size_t buffer_size : {std::size_t{1}, std::size_t{37}, std::size_t{4096}}) {
    SharedEdgeSink sink(100, false);
    std::vector<EdgeList> logs(4);
    {
      std::vector<std::jthread> pool;
      for (std::uint32_t w = 0; w < 4; ++w) {
        pool.emplace_back([&, w] {
          EdgeBuffer buffer(buffer_size, false);
          Mwc rng(w);
          for (int k = 0; k < 25000; ++k) {
            const std::uint32_t a = rng.next_u32() % 100000;
            const std::uint32_t b = a + 1 + rng.next_u32() % 1000;
            logs[w].emplace_back(a, b);
            buffer.push(a, b, 0.0f, sink);
          }
          buffer.flush(sink);
        });
      }
    }
    EdgeList expected;
    for (const auto& log : logs) expected.insert(expected.end(), log.begin(), log.end());
    std::sort(expected.begin(), expected.end());
    CHECK(sink.growth_events() > 0);
    const EdgeStore edges = sink.release();
    CAPTURE(buffer_size);
    CHECK(edges.size() == 100000);
    CHECK(sorted_edges(edges) == expected);
  }
}

TEST_CASE("schedule runs each task once") {
  std::vector<std::uint64_t> order;
  CHECK(schedule(50, 1, [&](std::uint64_t t, std::uint32_t w) {
          CHECK(w == 0);
          order.push_back(t);
        }) == 50);
  for (std::uint64_t t = 0; t < 50; ++t) CHECK(order[t] == t);

  std::vector<std::atomic<int>> seen(20000);
  std::set<std::uint32_t> workers;
  std::mutex mutex;
  CHECK(schedule(seen.size(), 4, [&](std::uint64_t t, std::uint32_t w) {
          seen[t].fetch_add(1);
          std::lock_guard lock(mutex);
          workers.insert(w);
        }) == seen.size());
  bool once = true;
  for (auto& s : seen) once = once && s.load() == 1;
  CHECK(once);
  CHECK(*workers.rbegin() < 4);

  CHECK_THROWS_AS(schedule(100, 3,
                           [](std::uint64_t t, std::uint32_t) {
                             if (t == 42) throw ParameterError("boom");
                           }),
                  ParameterError);
}

TEST_CASE("task_pair covers the bucket triangle") {
  constexpr std::uint64_t live = 400;
  std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::uint64_t t = 0; t < live * (live + 1) / 2; ++t) {
    const auto [a, b] = task_pair(t);
    CHECK(a <= b);
    CHECK(b < live);
    pairs.emplace(a, b);
  }
  CHECK(pairs.size() == live * (live + 1) / 2);
}

TEST_CASE("four workers visit every live bucket pair once") {
  GenConfig c = waxman(3000, 0.8, 10, 20);
  c.region = Region::ellipse(1, 1);
  c.workers = 4;
  c.seed = 3;
  const GenResult r = generate(c);
  std::uint64_t live = 0;
  for (auto count : r.nodes.counts) live += count > 0;
  CHECK(live < 400);
  CHECK(r.stats.tasks == live * (live + 1) / 2);
  CHECK(structurally_valid(r.edges, 3000));
}

TEST_CASE("bucket pairs with Q = 0 draw nothing") {
  const Region square = Region::rectangle(1, 1);
  const BucketGrid grid = BucketGrid::cover(square, 10);
  const LinkModel model{MetricKind::euclidean, Deterrence::make(DeterrenceKind::threshold, {.q = 1, .r = 0.05}, 1.5)};
  const QTable q = build_q_table(model, grid);
  const NodeStore nodes = generate_nodes(square, grid, 5000, 1);
  Mwc rng(1);
  EdgeGenCounters counters;
  auto ignore = [](std::uint32_t, std::uint32_t, double) {};
  detail::bucket_pair(nodes, grid, q, grid.linear({0, 0}), grid.linear({5, 5}), model, rng, ignore, counters);
  detail::bucket_pair(nodes, grid, q, grid.linear({0, 0}), grid.linear({2, 0}), model, rng, ignore, counters);
  CHECK(rng.draws() == 0);
  CHECK(counters.tasks == 2);
  CHECK(counters.skipped == 2);
  detail::bucket_pair(nodes, grid, q, grid.linear({0, 0}), grid.linear({1, 0}), model, rng, ignore, counters);
  CHECK(rng.draws() > 0);
  CHECK(counters.skipped == 2);
}

TEST_CASE("four workers with B = 1 stay structurally valid") {
  GenConfig c = waxman(5000, 0.9, 15, 10);
  c.workers = 4;
  c.buffer = 1;
  c.with_distances = true;
  const GenResult r = generate(c);
  CHECK(r.edges.size() == r.stats.edges);
  CHECK(r.edges.distance.size() == r.edges.size());
  CHECK(structurally_valid(r.edges, 5000));
  for (std::size_t k = 0; k < r.edges.size(); ++k) {
    const double d = Metric(MetricKind::euclidean)(r.nodes.point(r.edges.from[k]), r.nodes.point(r.edges.to[k]));
    REQUIRE(r.edges.distance[k] == static_cast<float>(d));
  }
}

TEST_CASE("thread counts give the same edge-count distribution") {
  GenConfig c = waxman(2000, 0.8, 10, 10);
  const Generator one(c);
  c.workers = 4;
  c.buffer = 64;
  const Generator four(c);
  std::vector<double> a;
  std::vector<double> b;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    a.push_back(static_cast<double>(one.run(seed).stats.edges));
    const GenResult r = four.run(seed + 100000);
    b.push_back(static_cast<double>(r.stats.edges));
    REQUIRE(structurally_valid(r.edges, 2000));
  }
  CHECK(chi_square_two_sample_values(a, b, 10) > 0.001);
}

TEST_CASE("memory accounting") {
  for (std::uint32_t workers : {1u, 3u}) {
    for (bool with_d : {false, true}) {
      GenConfig c = waxman(100000, 0.0, 1, 16);
      c.model.params.q = q_for_degree(c.n, 4.0, 0.5);
      c.workers = workers;
      c.with_distances = with_d;
      c.buffer = 1000;
      const GenResult r = generate(c);
      const std::size_t per_edge = with_d ? 12 : 8;
      CAPTURE(workers);
      CAPTURE(with_d);
      CHECK(r.stats.memory.node_bytes == 8 * r.nodes.size());
      CHECK(r.stats.memory.edge_bytes == per_edge * r.edges.size());
      const std::size_t m2 = 16 * 16;
      CHECK(r.stats.memory.overhead_bytes <= 64 * m2 + workers * per_edge * c.buffer);
      CHECK(r.stats.memory.peak_edge_bytes >= per_edge * r.edges.size());
    }
  }
}

TEST_CASE("statistics-only mode") {
  for (std::uint32_t workers : {1u, 4u}) {
    GenConfig c = waxman(20000, 0.01, 3, 12);
    c.workers = workers;
    c.seed = 9;
    const GenResult full = generate(c);
    c.stats_only = true;
    const GenResult summary = generate(c);
    REQUIRE(summary.summary.has_value());
    CHECK(summary.edges.size() == 0);
    const GraphStats& s = *summary.summary;
    std::uint64_t degree_sum = 0;
    for (auto d : s.degrees) degree_sum += d;
    CHECK(degree_sum == 2 * s.e);
    CHECK(s.e == summary.stats.edges);
    if (workers == 1) {
      // Same seed and order, so the same graph.
      CHECK(s.e == full.edges.size());
      const GraphStats direct = compute_stats(full.nodes, full.edges, MetricKind::euclidean, std::sqrt(2.0));
      CHECK(direct.degrees == s.degrees);
      CHECK(direct.lengths.counts() == s.lengths.counts());
    }
  }
}

TEST_CASE("fallbacks and warnings") {
  GenConfig c;
  c.n = 300;
  c.model.kind = DeterrenceKind::custom;
  c.model.custom = [](double d) { return std::abs(std::sin(8 * d)); };
  const GenResult r = generate(c);
  CHECK(r.stats.algorithm == Algorithm::naive);
  CHECK(r.stats.warnings.size() >= 2);
  CHECK(structurally_valid(r.edges, 300));

  GenConfig q = waxman(300, 0.5, 2);
  q.algorithm = Algorithm::qjump;
  q.workers = 4;
  const GenResult qr = generate(q);
  CHECK(qr.stats.algorithm == Algorithm::qjump);
  CHECK_FALSE(qr.stats.warnings.empty());
}

TEST_CASE("edge count at a million nodes matches the mean-degree formula") {
  constexpr std::uint64_t n = 1000000;
  const Region square = Region::rectangle(1, 1);
  Mwc rng(2718);
  const LaplaceEstimate g = estimate_gtilde(square, MetricKind::euclidean, 0.1, 10000000, rng);
  GenConfig c = waxman(n, q_for_degree(n, 1.0, g.value), 0.1, 10);
  c.seed = 11;
  const GenResult r = generate(c);
  const double expected = n / 2.0;
  // Poisson-like count noise plus the uncertainty of the G estimate.
  const double se = std::sqrt(expected + std::pow(expected * g.std_error / g.value, 2));
  CHECK(std::abs(static_cast<double>(r.edges.size()) - expected) < 3 * se);
  CHECK(structurally_valid(r.edges, n));
}

TEST_CASE("generator reuse on an existing node store") {
  GenConfig c = waxman(2000, 0.6, 4, 8);
  const Generator g(c);
  const GenResult first = g.run(1);
  const GenResult again = g.run_edges(first.nodes, 1);
  CHECK(again.edges.from == first.edges.from);
  NodeStore wrong;
  wrong.counts.resize(3);
  CHECK_THROWS_AS(g.run_edges(wrong, 1), ParameterError);
}
