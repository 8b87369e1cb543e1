#include "sern/edgegen.hpp"

#include <cmath>

#include "edge_kernels.hpp"
#include "sern/errors.hpp"

namespace sern {

std::uint64_t isqrt(unsigned __int128 v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (static_cast<unsigned __int128>(r) * r > v) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= v) ++r;
  return r;
}

namespace {

EdgeStore empty_store(const EdgeGenOptions& options) {
  EdgeStore edges;
  edges.with_distances = options.with_distances;
  return edges;
}

void require_bounds(const LinkModel& model, const char* algorithm) {
  if (!model.deterrence.supports_bounds()) {
    throw ParameterError(std::string(algorithm) + " needs a non-increasing link probability; use the naive algorithm");
  }
}

}  // namespace

EdgeStore generate_edges_naive(const NodeStore& nodes, const LinkModel& model, Mwc& rng,
                               const EdgeGenOptions& options, EdgeGenCounters* counters) {
  const std::uint32_t n = nodes.size();
  if (n > kNaiveLimit && !options.allow_large) {
    throw ParameterError("naive algorithm refuses more than 100000 nodes without the override");
  }
  EdgeStore edges = empty_store(options);
  EdgeGenCounters local;
  auto emit = [&](std::uint32_t a, std::uint32_t b, double d) { edges.push(a, b, static_cast<float>(d)); };
  detail::naive_pairs(nodes, model, rng, emit, local);
  if (counters != nullptr) *counters = local;
  return edges;
}

EdgeStore generate_edges_qjump(const NodeStore& nodes, const LinkModel& model, Mwc& rng,
                               const EdgeGenOptions& options, EdgeGenCounters* counters) {
  require_bounds(model, "q-jumping");
  EdgeStore edges = empty_store(options);
  EdgeGenCounters local;
  const double p_max = model.deterrence.max_probability();
  auto emit = [&](std::uint32_t a, std::uint32_t b, double d) { edges.push(a, b, static_cast<float>(d)); };
  detail::same_bucket_pairs(nodes, 0, nodes.size(), p_max, model, rng, emit, local);
  if (counters != nullptr) *counters = local;
  return edges;
}

EdgeStore generate_edges_bucket(const NodeStore& nodes, const BucketGrid& grid, const LinkModel& model,
                                const QTable& q, Mwc& rng, const EdgeGenOptions& options,
                                EdgeGenCounters* counters) {
  require_bounds(model, "bucket");
  if (nodes.counts.size() != grid.size() || q.cols() != grid.cols() || q.rows() != grid.rows()) {
    throw ParameterError("node store, grid and Q table do not match");
  }
  EdgeStore edges = empty_store(options);
  EdgeGenCounters local;
  auto emit = [&](std::uint32_t a, std::uint32_t b, double d) { edges.push(a, b, static_cast<float>(d)); };
  const std::uint32_t buckets = grid.size();
  for (std::uint32_t lo = 0; lo < buckets; ++lo) {
    if (nodes.counts[lo] == 0) continue;
    for (std::uint32_t hi = lo; hi < buckets; ++hi) {
      if (nodes.counts[hi] == 0) continue;
      detail::bucket_pair(nodes, grid, q, lo, hi, model, rng, emit, local);
    }
  }
  if (counters != nullptr) *counters = local;
  return edges;
}

}  // namespace sern
