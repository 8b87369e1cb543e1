#pragma once

#include <cstdint>
#include <vector>

#include "sern/geometry.hpp"
#include "sern/model.hpp"
#include "sern/nodegen.hpp"
#include "sern/rng.hpp"

namespace sern {

/// Undirected edge list, from < to for every edge, optionally with the
/// link length that was used for the acceptance test.
struct EdgeStore {
  std::vector<std::uint32_t> from;
  std::vector<std::uint32_t> to;
  std::vector<float> distance;
  bool with_distances = false;

  std::size_t size() const { return from.size(); }
  void push(std::uint32_t a, std::uint32_t b, float d) {
    from.push_back(a);
    to.push_back(b);
    if (with_distances) distance.push_back(d);
  }
  std::size_t payload_bytes() const {
    return (from.capacity() + to.capacity()) * sizeof(std::uint32_t) + distance.capacity() * sizeof(float);
  }
};

struct LocalPair {
  std::uint64_t i = 0;
  std::uint64_t j = 0;
};

/// Pair k of the cross product of two buckets: i = k mod c_i, j = k / c_i.
inline LocalPair decode_pair_cross(std::uint64_t k, std::uint64_t count_i) {
  return {k % count_i, k / count_i};
}

/// Integer square root of a value below 2^66.
std::uint64_t isqrt(unsigned __int128 v);

/// Pair k of the strict upper triangle, enumerated (0,1), (0,2), (1,2),
/// (0,3), ...: j = 1 + (isqrt(8k + 1) - 1) / 2, i = k - j(j - 1) / 2.
inline LocalPair decode_pair_same(std::uint64_t k) {
  const std::uint64_t root = isqrt(static_cast<unsigned __int128>(k) * 8 + 1);
  const std::uint64_t j = 1 + (root - 1) / 2;
  return {k - j * (j - 1) / 2, j};
}

inline std::uint64_t same_pair_count(std::uint64_t c) { return c < 2 ? 0 : c * (c - 1) / 2; }

struct EdgeGenCounters {
  std::uint64_t hits = 0;      // candidate pairs produced by geometric skipping
  std::uint64_t accepted = 0;  // edges emitted
  std::uint64_t tasks = 0;     // bucket pairs visited
  std::uint64_t skipped = 0;   // bucket pairs with Q = 0
};

struct EdgeGenOptions {
  bool with_distances = false;
  /// The naive oracle refuses more than kNaiveLimit nodes unless set.
  bool allow_large = false;
};

inline constexpr std::uint64_t kNaiveLimit = 100000;

/// One Bernoulli trial per pair, p(d) each.
EdgeStore generate_edges_naive(const NodeStore& nodes, const LinkModel& model, Mwc& rng,
                               const EdgeGenOptions& options = {}, EdgeGenCounters* counters = nullptr);

/// Geometric skips over all n(n-1)/2 pairs at p_max = sup p, each hit kept
/// with probability p(d) / p_max.
EdgeStore generate_edges_qjump(const NodeStore& nodes, const LinkModel& model, Mwc& rng,
                               const EdgeGenOptions& options = {}, EdgeGenCounters* counters = nullptr);

/// Geometric skips per bucket pair at Q(offset), hits kept with probability
/// p(d) / Q. Bucket pairs visited row-major, I <= J.
EdgeStore generate_edges_bucket(const NodeStore& nodes, const BucketGrid& grid, const LinkModel& model,
                                const QTable& q, Mwc& rng, const EdgeGenOptions& options = {},
                                EdgeGenCounters* counters = nullptr);

}  // namespace sern
