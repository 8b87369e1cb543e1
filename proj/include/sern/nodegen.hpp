#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sern/geometry.hpp"
#include "sern/rng.hpp"

namespace sern {

/// Largest supported node count is 2^32 - 1 so ids fit in 32 bits.
inline constexpr std::uint64_t kMaxNodes = 0xffffffffULL;

/// Node coordinates laid out bucket by bucket. A node's id is its index in
/// `x`/`y`; bucket b owns ids [offsets[b], offsets[b] + counts[b]).
struct NodeStore {
  std::vector<float> x;
  std::vector<float> y;
  std::vector<std::uint32_t> counts;
  std::vector<std::uint32_t> offsets;

  std::uint32_t size() const { return static_cast<std::uint32_t>(x.size()); }
  Point point(std::uint32_t id) const { return {x[id], y[id]}; }
  std::size_t payload_bytes() const { return (x.capacity() + y.capacity()) * sizeof(float); }
};

/// Nodes per bucket, Multinomial(n, P) drawn in row-major bucket order.
std::vector<std::uint32_t> allocate_counts(const BucketGrid& grid, std::uint64_t n, Mwc& rng);

/// Fill xs/ys with points uniform on cell(bucket) intersected with the region.
/// Candidates are drawn in the cell in double precision and tested after
/// rounding to float, so every stored point lies in its closed cell and in
/// the region. Returns the number of rejected candidates.
std::uint64_t fill_bucket(const Region& region, const BucketGrid& grid, std::uint32_t bucket, std::span<float> xs,
                          std::span<float> ys, Mwc& rng);

struct NodeGenStats {
  std::uint64_t rejections = 0;
};

/// Counts from the `counts` stream of `seed`, then buckets split into
/// `workers` contiguous ranges of roughly equal node count, each filled from
/// its own `nodes` stream. Output is reproducible per (seed, workers).
NodeStore generate_nodes(const Region& region, const BucketGrid& grid, std::uint64_t n, std::uint64_t seed,
                         std::uint32_t workers = 1, NodeGenStats* stats = nullptr);

}  // namespace sern
