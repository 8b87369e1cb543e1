#pragma once

// Hot loops shared by the sequential entry points and the engine's workers.
// `emit(from, to, distance)` receives each accepted edge with from < to.

#include <cstdint>

#include "sern/edgegen.hpp"

namespace sern::detail {

inline bool accept(double p, double bound, Mwc& rng) {
  return p >= bound || rng.next_uniform_pos() * bound <= p;
}

template <class Emit>
void same_bucket_pairs(const NodeStore& nodes, std::uint32_t offset, std::uint32_t count, double bound,
                       const LinkModel& model, Mwc& rng, Emit&& emit, EdgeGenCounters& counters) {
  const std::uint64_t total = same_pair_count(count);
  if (total == 0 || !(bound > 0.0)) return;
  const GeometricSkip skip(bound);
  const float* xs = nodes.x.data() + offset;
  const float* ys = nodes.y.data() + offset;
  std::uint64_t next = 0;
  for (;;) {
    const double gap = skip.draw(rng);
    if (gap >= static_cast<double>(total - next)) break;
    next += static_cast<std::uint64_t>(gap);
    if (next >= total) break;
    const LocalPair pair = decode_pair_same(next);
    ++next;
    ++counters.hits;
    const double d = model.metric({xs[pair.i], ys[pair.i]}, {xs[pair.j], ys[pair.j]});
    if (accept(model.deterrence(d), bound, rng)) {
      emit(offset + static_cast<std::uint32_t>(pair.i), offset + static_cast<std::uint32_t>(pair.j), d);
      ++counters.accepted;
    }
  }
}

// Bucket `lo` precedes bucket `hi` in linear order, so its ids are smaller.
template <class Emit>
void cross_bucket_pairs(const NodeStore& nodes, std::uint32_t lo, std::uint32_t hi, double bound,
                        const LinkModel& model, Mwc& rng, Emit&& emit, EdgeGenCounters& counters) {
  const std::uint64_t count_lo = nodes.counts[lo];
  const std::uint64_t total = count_lo * nodes.counts[hi];
  if (total == 0 || !(bound > 0.0)) return;
  const GeometricSkip skip(bound);
  const std::uint32_t offset_lo = nodes.offsets[lo];
  const std::uint32_t offset_hi = nodes.offsets[hi];
  const float* xs = nodes.x.data();
  const float* ys = nodes.y.data();
  std::uint64_t next = 0;
  for (;;) {
    const double gap = skip.draw(rng);
    if (gap >= static_cast<double>(total - next)) break;
    next += static_cast<std::uint64_t>(gap);
    if (next >= total) break;
    const LocalPair pair = decode_pair_cross(next, count_lo);
    ++next;
    ++counters.hits;
    const std::uint32_t a = offset_lo + static_cast<std::uint32_t>(pair.i);
    const std::uint32_t b = offset_hi + static_cast<std::uint32_t>(pair.j);
    const double d = model.metric({xs[a], ys[a]}, {xs[b], ys[b]});
    if (accept(model.deterrence(d), bound, rng)) {
      emit(a, b, d);
      ++counters.accepted;
    }
  }
}

template <class Emit>
void naive_pairs(const NodeStore& nodes, const LinkModel& model, Mwc& rng, Emit&& emit, EdgeGenCounters& counters) {
  const std::uint32_t n = nodes.size();
  for (std::uint32_t i = 0; i < n; ++i) {
    const Point a = nodes.point(i);
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double d = model.metric(a, nodes.point(j));
      ++counters.hits;
      if (rng.next_uniform_pos() <= model.deterrence(d)) {
        emit(i, j, d);
        ++counters.accepted;
      }
    }
  }
}

inline double pair_bound(const BucketGrid& grid, const QTable& q, std::uint32_t lo, std::uint32_t hi) {
  const CellIndex a = grid.cell(lo);
  const CellIndex b = grid.cell(hi);
  const std::uint32_t di = a.i > b.i ? a.i - b.i : b.i - a.i;
  const std::uint32_t dj = a.j > b.j ? a.j - b.j : b.j - a.j;
  return q.at(di, dj);
}

/// One bucket-pair task (lo <= hi). Q = 0 pairs return before any draw.
template <class Emit>
void bucket_pair(const NodeStore& nodes, const BucketGrid& grid, const QTable& q, std::uint32_t lo, std::uint32_t hi,
                 const LinkModel& model, Mwc& rng, Emit&& emit, EdgeGenCounters& counters) {
  ++counters.tasks;
  const double bound = pair_bound(grid, q, lo, hi);
  if (!(bound > 0.0)) {
    ++counters.skipped;
    return;
  }
  if (lo == hi) {
    same_bucket_pairs(nodes, nodes.offsets[lo], nodes.counts[lo], bound, model, rng, emit, counters);
  } else {
    cross_bucket_pairs(nodes, lo, hi, bound, model, rng, emit, counters);
  }
}

}  // namespace sern::detail
