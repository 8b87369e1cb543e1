#include "sern/nodegen.hpp"

#include <thread>

#include "sern/errors.hpp"

namespace sern {

std::vector<std::uint32_t> allocate_counts(const BucketGrid& grid, std::uint64_t n, Mwc& rng) {
  if (n > kMaxNodes) throw ParameterError("node count must be below 2^32");
  const auto drawn = multinomial(rng, n, grid.probabilities());
  return {drawn.begin(), drawn.end()};
}

std::uint64_t fill_bucket(const Region& region, const BucketGrid& grid, std::uint32_t bucket, std::span<float> xs,
                          std::span<float> ys, Mwc& rng) {
  const Box box = grid.cell_box(bucket);
  const bool interior = grid.interior(bucket);
  std::uint64_t rejected = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    for (;;) {
      const float x = static_cast<float>(box.x0 + rng.next_uniform() * box.width());
      const float y = static_cast<float>(box.y0 + rng.next_uniform() * box.height());
      const Point p{x, y};
      if (box.contains(p) && (interior || point_in_region(region, p))) {
        xs[k] = x;
        ys[k] = y;
        break;
      }
      ++rejected;
    }
  }
  return rejected;
}

NodeStore generate_nodes(const Region& region, const BucketGrid& grid, std::uint64_t n, std::uint64_t seed,
                         std::uint32_t workers, NodeGenStats* stats) {
  if (n > kMaxNodes) throw ParameterError("node count must be below 2^32");
  if (workers < 1) throw ParameterError("worker count must be at least 1");

  NodeStore store;
  Mwc count_rng(derive_seed(seed, Stream::counts, 0));
  store.counts = allocate_counts(grid, n, count_rng);
  store.offsets.resize(store.counts.size());
  std::uint64_t running = 0;
  for (std::size_t b = 0; b < store.counts.size(); ++b) {
    store.offsets[b] = static_cast<std::uint32_t>(running);
    running += store.counts[b];
  }
  store.x.resize(n);
  store.y.resize(n);

  // Contiguous bucket ranges with roughly n / workers nodes each.
  const std::uint32_t buckets = grid.size();
  std::vector<std::uint32_t> split{0};
  for (std::uint32_t w = 1; w < workers; ++w) {
    const std::uint64_t target = n * w / workers;
    std::uint32_t b = split.back();
    while (b < buckets && store.offsets[b] < target) ++b;
    split.push_back(b);
  }
  split.push_back(buckets);

  std::vector<std::uint64_t> rejected(workers, 0);
  auto fill_range = [&](std::uint32_t w) {
    Mwc rng(derive_seed(seed, Stream::nodes, w));
    for (std::uint32_t b = split[w]; b < split[w + 1]; ++b) {
      const std::uint32_t count = store.counts[b];
      if (count == 0) continue;
      std::span<float> xs(store.x.data() + store.offsets[b], count);
      std::span<float> ys(store.y.data() + store.offsets[b], count);
      rejected[w] += fill_bucket(region, grid, b, xs, ys, rng);
    }
  };

  if (workers == 1) {
    fill_range(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(fill_range, w);
  }

  if (stats != nullptr) {
    stats->rejections = 0;
    for (const auto r : rejected) stats->rejections += r;
  }
  return store;
}

}  // namespace sern
