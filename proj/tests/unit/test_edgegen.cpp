#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sern/edgegen.hpp"
#include "sern/errors.hpp"
#include "sern/rng.hpp"
#include "support/stat_tests.hpp"

using namespace sern;
using namespace sern::testing;

namespace {

enum class Algo { naive, qjump, bucket };
constexpr Algo kAlgos[] = {Algo::naive, Algo::qjump, Algo::bucket};
const char* name(Algo a) { return a == Algo::naive ? "naive" : a == Algo::qjump ? "qjump" : "bucket"; }

// Nodes at the given points, grouped by bucket.
NodeStore make_store(const BucketGrid& grid, const std::vector<Point>& points) {
  std::vector<std::vector<Point>> by_bucket(grid.size());
  for (Point p : points) by_bucket[grid.linear(grid.locate(p))].push_back(p);
  NodeStore nodes;
  nodes.counts.resize(grid.size());
  nodes.offsets.resize(grid.size());
  for (std::uint32_t b = 0; b < grid.size(); ++b) {
    nodes.offsets[b] = nodes.size();
    nodes.counts[b] = static_cast<std::uint32_t>(by_bucket[b].size());
    for (Point p : by_bucket[b]) {
      nodes.x.push_back(static_cast<float>(p.x));
      nodes.y.push_back(static_cast<float>(p.y));
    }
  }
  return nodes;
}

struct Setup {
  Region region = Region::rectangle(1, 1);
  BucketGrid grid;
  LinkModel model;
  QTable q;
  NodeStore nodes;

  Setup(DeterrenceKind kind, DeterrenceParams params, std::uint32_t m, std::uint64_t n, std::uint64_t seed,
        MetricKind metric = MetricKind::euclidean)
      : grid(BucketGrid::cover(region, m)),
        model{metric, Deterrence::make(kind, params, longest_link(region, metric))},
        q(build_q_table(model, grid)),
        nodes(generate_nodes(region, grid, n, seed)) {}

  EdgeStore run(Algo a, Mwc& rng, EdgeGenCounters* counters = nullptr, bool distances = false) const {
    const EdgeGenOptions options{.with_distances = distances};
    switch (a) {
      case Algo::naive:
        return generate_edges_naive(nodes, model, rng, options, counters);
      case Algo::qjump:
        return generate_edges_qjump(nodes, model, rng, options, counters);
      case Algo::bucket:
        return generate_edges_bucket(nodes, grid, model, q, rng, options, counters);
    }
    return {};
  }
};

void check_structure(const EdgeStore& edges, std::uint32_t n) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  bool ok = edges.from.size() == edges.to.size();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    ok = ok && edges.from[k] < edges.to[k] && edges.to[k] < n;
    ok = ok && seen.emplace(edges.from[k], edges.to[k]).second;
  }
  CHECK(ok);
}

}  // namespace

TEST_CASE("cross decoder examples") {
  CHECK(decode_pair_cross(0, 3).i == 0);
  CHECK(decode_pair_cross(0, 3).j == 0);
  CHECK(decode_pair_cross(5, 3).i == 2);
  CHECK(decode_pair_cross(5, 3).j == 1);
}

TEST_CASE("same decoder examples") {
  CHECK(decode_pair_same(0).i == 0);
  CHECK(decode_pair_same(0).j == 1);
  CHECK(decode_pair_same(2).i == 1);
  CHECK(decode_pair_same(2).j == 2);
  CHECK(decode_pair_same(3).i == 0);
  CHECK(decode_pair_same(3).j == 3);
}

TEST_CASE("cross decoder is a bijection for counts up to 100") {
  bool ok = true;
  for (std::uint64_t ci = 1; ci <= 100; ++ci) {
    for (std::uint64_t cj = 1; cj <= 100; ++cj) {
      std::vector<char> seen(ci * cj, 0);
      for (std::uint64_t k = 0; k < ci * cj; ++k) {
        const LocalPair p = decode_pair_cross(k, ci);
        ok = ok && p.i < ci && p.j < cj && !seen[p.j * ci + p.i];
        seen[p.j * ci + p.i] = 1;
      }
    }
  }
  CHECK(ok);
}

TEST_CASE("same decoder is a bijection for counts up to 500") {
  bool ok = true;
  for (std::uint64_t c = 2; c <= 500; ++c) {
    // Brute-force enumeration in the decoder's order.
    std::uint64_t k = 0;
    std::vector<char> seen(c * c, 0);
    for (std::uint64_t j = 1; j < c; ++j) {
      for (std::uint64_t i = 0; i < j; ++i, ++k) {
        const LocalPair p = decode_pair_same(k);
        ok = ok && p.i == i && p.j == j && !seen[p.i * c + p.j];
        seen[p.i * c + p.j] = 1;
      }
    }
    ok = ok && k == same_pair_count(c);
  }
  CHECK(ok);
}

TEST_CASE("same decoder at the edge of the 32-bit id space") {
  const std::uint64_t n = kMaxNodes;
  const std::uint64_t total = same_pair_count(n);
  const LocalPair last = decode_pair_same(total - 1);
  CHECK(last.i == n - 2);
  CHECK(last.j == n - 1);
  const LocalPair first_of_last_column = decode_pair_same(total - (n - 1));
  CHECK(first_of_last_column.i == 0);
  CHECK(first_of_last_column.j == n - 1);
}

TEST_CASE("integer square root") {
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(1) == 1);
  CHECK(isqrt(15) == 3);
  CHECK(isqrt(16) == 4);
  const std::uint64_t big = 0xffffffffULL * 3;
  const unsigned __int128 sq = static_cast<unsigned __int128>(big) * big;
  CHECK(isqrt(sq) == big);
  CHECK(isqrt(sq - 1) == big - 1);
  CHECK(isqrt(sq + 1) == big);
  const unsigned __int128 top = static_cast<unsigned __int128>(1) << 66;
  CHECK(isqrt(top - 1) == (1ULL << 33) - 1);
}

TEST_CASE("trivial models") {
  Mwc rng(1);
  const Setup two(DeterrenceKind::ger, {.q = 1}, 1, 2, 1);
  for (Algo a : kAlgos) CHECK(two.run(a, rng).size() == 1);

  const Setup none(DeterrenceKind::ger, {.q = 0}, 5, 100, 1);
  for (Algo a : kAlgos) {
    const std::uint64_t before = rng.draws();
    CHECK(none.run(a, rng).size() == 0);
    if (a != Algo::naive) CHECK(rng.draws() == before);
  }
}

TEST_CASE("complete coverage of the pair space") {
  Mwc rng(2);
  for (std::uint32_t m : {1u, 3u, 10u}) {
    const Setup s(DeterrenceKind::ger, {.q = 1}, m, 300, 11);
    for (Algo a : kAlgos) {
      const EdgeStore edges = s.run(a, rng);
      CAPTURE(name(a));
      CAPTURE(m);
      CHECK(edges.size() == 300 * 299 / 2);
      check_structure(edges, 300);
    }
  }
}

TEST_CASE("ger hits are always accepted by q-jumping") {
  Mwc rng(3);
  const Setup s(DeterrenceKind::ger, {.q = 0.05}, 4, 500, 3);
  EdgeGenCounters counters;
  const EdgeStore edges = s.run(Algo::qjump, rng, &counters);
  CHECK(counters.hits == counters.accepted);
  CHECK(counters.accepted == edges.size());
}

TEST_CASE("naive refuses large inputs unless overridden") {
  NodeStore nodes;
  nodes.x.assign(kNaiveLimit + 1, 0.5f);
  nodes.y.assign(kNaiveLimit + 1, 0.5f);
  const LinkModel model{MetricKind::euclidean, Deterrence::make(DeterrenceKind::ger, {.q = 0}, 1.0)};
  Mwc rng(1);
  CHECK_THROWS_AS(generate_edges_naive(nodes, model, rng), ParameterError);
}

TEST_CASE("bound-based algorithms refuse non-monotone custom functions") {
  const Region square = Region::rectangle(1, 1);
  const BucketGrid grid = BucketGrid::cover(square, 2);
  const LinkModel model{MetricKind::euclidean, Deterrence::custom([](double d) { return d; }, std::sqrt(2.0))};
  const NodeStore nodes = generate_nodes(square, grid, 50, 1);
  Mwc rng(1);
  CHECK_NOTHROW(generate_edges_naive(nodes, model, rng));
  CHECK_THROWS_AS(generate_edges_qjump(nodes, model, rng), ParameterError);
  CHECK_THROWS_AS(generate_edges_bucket(nodes, grid, model, build_q_table(model, grid), rng), ParameterError);
}

TEST_CASE("mismatched grid is rejected") {
  const Setup s(DeterrenceKind::ger, {.q = 0.5}, 4, 50, 1);
  const BucketGrid other = BucketGrid::cover(s.region, 5);
  Mwc rng(1);
  CHECK_THROWS_AS(generate_edges_bucket(s.nodes, other, s.model, s.q, rng), ParameterError);
}

TEST_CASE("one bucket reproduces q-jumping exactly") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.8, .s = 4}, 1, 400, 5);
  Mwc a(99);
  Mwc b(99);
  const EdgeStore qj = s.run(Algo::qjump, a);
  const EdgeStore bu = s.run(Algo::bucket, b);
  CHECK(qj.from == bu.from);
  CHECK(qj.to == bu.to);
  CHECK(qj.size() > 0);
}

TEST_CASE("emitted distances match the stored coordinates") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.9, .s = 2}, 6, 300, 8, MetricKind::manhattan);
  Mwc rng(4);
  for (Algo a : kAlgos) {
    const EdgeStore edges = s.run(a, rng, nullptr, true);
    REQUIRE(edges.distance.size() == edges.size());
    int mismatches = 0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const double d = s.model.metric(s.nodes.point(edges.from[k]), s.nodes.point(edges.to[k]));
      mismatches += edges.distance[k] != static_cast<float>(d);
    }
    CHECK(mismatches == 0);
    CHECK(edges.payload_bytes() >= 12 * edges.size());
  }
}

TEST_CASE("threshold model only visits nearby buckets") {
  // Cell side 0.1; r = 0.05 is below the one-cell gap, so only same and
  // adjacent buckets have Q > 0.
  const Setup s(DeterrenceKind::threshold, {.q = 1, .r = 0.05}, 10, 3000, 12);
  Mwc rng(5);
  EdgeGenCounters counters;
  const EdgeStore edges = s.run(Algo::bucket, rng, &counters, true);
  std::uint64_t live = 0;
  for (auto c : s.nodes.counts) live += c > 0;
  std::uint64_t near = 0;
  for (std::uint32_t a = 0; a < s.grid.size(); ++a) {
    for (std::uint32_t b = a; b < s.grid.size(); ++b) {
      if (s.nodes.counts[a] == 0 || s.nodes.counts[b] == 0) continue;
      const CellIndex ca = s.grid.cell(a);
      const CellIndex cb = s.grid.cell(b);
      near += std::abs(int(ca.i) - int(cb.i)) <= 1 && std::abs(int(ca.j) - int(cb.j)) <= 1;
    }
  }
  CHECK(counters.tasks == live * (live + 1) / 2);
  CHECK(counters.tasks - counters.skipped == near);
  CHECK(edges.size() > 0);
  CHECK(*std::max_element(edges.distance.begin(), edges.distance.end()) <= 0.05f);
  check_structure(edges, 3000);
}

TEST_CASE("naive edge count matches the sum of pair probabilities") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.8, .s = 2}, 1, 100, 21);
  double expected = 0.0;
  double variance = 0.0;
  for (std::uint32_t i = 0; i < 100; ++i) {
    for (std::uint32_t j = i + 1; j < 100; ++j) {
      const double p = s.model.probability(s.nodes.point(i), s.nodes.point(j));
      expected += p;
      variance += p * (1 - p);
    }
  }
  Mwc rng(6);
  std::vector<double> counts(10000);
  for (auto& c : counts) c = static_cast<double>(s.run(Algo::naive, rng).size());
  const MeanSe m = mean_se(counts);
  CHECK(std::abs(m.mean - expected) < 3 * std::sqrt(variance / counts.size()));
}

TEST_CASE("three coincident nodes: exact outcome distribution") {
  const Region square = Region::rectangle(1, 1);
  const BucketGrid grid = BucketGrid::cover(square, 1);
  const NodeStore nodes = make_store(grid, {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  const LinkModel model{MetricKind::euclidean,
                        Deterrence::make(DeterrenceKind::waxman, {.q = 0.5, .s = 7}, std::sqrt(2.0))};
  const QTable q = build_q_table(model, grid);
  for (Algo a : kAlgos) {
    Mwc rng(42);
    std::vector<double> outcomes(8, 0.0);
    for (int run = 0; run < 100000; ++run) {
      EdgeStore edges;
      if (a == Algo::naive) edges = generate_edges_naive(nodes, model, rng);
      if (a == Algo::qjump) edges = generate_edges_qjump(nodes, model, rng);
      if (a == Algo::bucket) edges = generate_edges_bucket(nodes, grid, model, q, rng);
      int mask = 0;
      for (std::size_t k = 0; k < edges.size(); ++k) mask |= 1 << (edges.from[k] + edges.to[k] - 1);
      ++outcomes[mask];
    }
    CAPTURE(name(a));
    CHECK(chi_square_gof(outcomes, std::vector<double>(8, 100000 / 8.0)) > 0.001);
  }
}

TEST_CASE("per-pair inclusion frequencies on a fixed 12-node store") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.8, .s = 3}, 3, 12, 13);
  constexpr int kRuns = 100000;
  for (Algo a : kAlgos) {
    Mwc rng(1000 + static_cast<int>(a));
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> hits;
    for (int run = 0; run < kRuns; ++run) {
      const EdgeStore edges = s.run(a, rng);
      for (std::size_t k = 0; k < edges.size(); ++k) ++hits[{edges.from[k], edges.to[k]}];
    }
    int failures = 0;
    for (std::uint32_t i = 0; i < 12; ++i) {
      for (std::uint32_t j = i + 1; j < 12; ++j) {
        const double p = s.model.probability(s.nodes.point(i), s.nodes.point(j));
        const double f = hits[{i, j}] / static_cast<double>(kRuns);
        failures += std::abs(f - p) > 4 * std::sqrt(p * (1 - p) / kRuns);
      }
    }
    CAPTURE(name(a));
    CHECK(failures == 0);
  }
}

TEST_CASE("q-jumping and naive edge counts agree") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.8, .s = 1}, 1, 200, 14);
  Mwc rng(15);
  std::vector<double> naive(10000);
  std::vector<double> qjump(10000);
  for (auto& c : naive) c = static_cast<double>(s.run(Algo::naive, rng).size());
  for (auto& c : qjump) c = static_cast<double>(s.run(Algo::qjump, rng).size());
  CHECK(chi_square_two_sample_values(naive, qjump, 20) > 0.001);
}

TEST_CASE("bucket and naive edge lengths agree") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.8, .s = 10}, 10, 200, 16);
  Mwc rng(17);
  std::vector<double> naive;
  std::vector<double> bucket;
  for (int run = 0; run < 5000; ++run) {
    for (float d : s.run(Algo::naive, rng, nullptr, true).distance) naive.push_back(d);
    for (float d : s.run(Algo::bucket, rng, nullptr, true).distance) bucket.push_back(d);
  }
  CHECK(chi_square_two_sample_values(naive, bucket, 20) > 0.001);
}

TEST_CASE("bucket hits match the expected work") {
  const Setup s(DeterrenceKind::waxman, {.q = 0.9, .s = 6}, 8, 2000, 18);
  double mean = 0.0;
  double variance = 0.0;
  for (std::uint32_t a = 0; a < s.grid.size(); ++a) {
    for (std::uint32_t b = a; b < s.grid.size(); ++b) {
      const CellIndex ca = s.grid.cell(a);
      const CellIndex cb = s.grid.cell(b);
      const double q = s.q.at(std::abs(int(ca.i) - int(cb.i)), std::abs(int(ca.j) - int(cb.j)));
      const double pairs = a == b ? static_cast<double>(same_pair_count(s.nodes.counts[a]))
                                  : static_cast<double>(s.nodes.counts[a]) * s.nodes.counts[b];
      mean += pairs * q;
      variance += pairs * q * (1 - q);
    }
  }
  Mwc rng(19);
  constexpr int kRuns = 200;
  double total = 0.0;
  for (int run = 0; run < kRuns; ++run) {
    EdgeGenCounters counters;
    s.run(Algo::bucket, rng, &counters);
    total += static_cast<double>(counters.hits);
  }
  CHECK(std::abs(total / kRuns - mean) < 3 * std::sqrt(variance / kRuns));
}

TEST_CASE("structural invariants across models and metrics") {
  Mwc rng(20);
  for (MetricKind metric : {MetricKind::euclidean, MetricKind::manhattan, MetricKind::max, MetricKind::discrete}) {
    const Setup s(DeterrenceKind::power_law, {.q = 0.9, .theta1 = 20, .theta2 = 2}, 7, 1500, 21, metric);
    for (Algo a : kAlgos) check_structure(s.run(a, rng), 1500);
  }
}
