#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "sern/analysis.hpp"
#include "sern/edgegen.hpp"
#include "sern/geometry.hpp"
#include "sern/model.hpp"
#include "sern/nodegen.hpp"

namespace sern {

enum class Algorithm { naive, qjump, bucket };

std::string to_string(Algorithm algorithm);

/// Which deterrence function to build once the region and metric fix L.
struct ModelSpec {
  DeterrenceKind kind = DeterrenceKind::waxman;
  DeterrenceParams params;
  Deterrence::Function custom;  // used when kind == custom
};

inline constexpr std::uint32_t kDefaultGridSize = 20;
inline constexpr std::uint64_t kDefaultBuffer = 1 << 14;

struct GenConfig {
  std::uint64_t n = 0;
  Region region = Region::rectangle(1.0, 1.0);
  Metric metric = MetricKind::euclidean;
  ModelSpec model;
  std::uint32_t grid_size = kDefaultGridSize;
  Algorithm algorithm = Algorithm::bucket;
  std::uint32_t workers = 1;
  std::uint64_t buffer = kDefaultBuffer;
  std::uint64_t seed = 0;
  bool with_distances = false;
  /// Accumulate degree and length histograms instead of storing edges.
  bool stats_only = false;
  bool allow_large_naive = false;
  std::size_t histogram_bins = kDefaultBins;

  /// Throws ParameterError on n >= 2^32, grid_size, workers or buffer < 1.
  void validate() const;
};

struct MemoryAccount {
  std::size_t node_bytes = 0;      // x and y arrays
  std::size_t edge_bytes = 0;      // from, to and distance arrays as returned
  std::size_t overhead_bytes = 0;  // grid tables, Q, bucket counts, worker buffers
  std::size_t peak_edge_bytes = 0;
};

struct GenStats {
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  std::uint64_t hits = 0;
  std::uint64_t edge_rejections = 0;  // hits that failed the acceptance test
  std::uint64_t node_rejections = 0;
  std::uint64_t tasks = 0;
  std::uint64_t skipped_tasks = 0;
  std::uint64_t growth_events = 0;
  Algorithm algorithm = Algorithm::bucket;  // as run, after any fallback
  double node_seconds = 0.0;
  double edge_seconds = 0.0;
  MemoryAccount memory;
  std::vector<std::string> warnings;
};

struct GenResult {
  NodeStore nodes;
  EdgeStore edges;
  GenStats stats;
  /// Set in stats-only mode.
  std::optional<GraphStats> summary;
};

/// Edges from many workers packed into one contiguous store.
///
/// A commit reserves its range with an atomic cursor under a shared lock and
/// copies in place. When the range runs past capacity the committer takes the
/// lock exclusively, which waits out in-flight copies, and grows by 1.5x.
class SharedEdgeSink {
 public:
  SharedEdgeSink(std::size_t capacity, bool with_distances);

  /// Copy one worker buffer in. `distance` must be empty or match `from`.
  void commit(std::span<const std::uint32_t> from, std::span<const std::uint32_t> to,
              std::span<const float> distance);

  std::size_t size() const { return cursor_.load(); }
  std::size_t capacity() const;
  std::uint64_t growth_events() const { return growths_; }
  std::size_t peak_bytes() const { return peak_bytes_; }

  /// Hand over the committed edges, trimmed to size. Call once all
  /// committers have finished.
  EdgeStore release();

 private:
  void grow(std::size_t needed);

  mutable std::shared_mutex mutex_;
  std::atomic<std::size_t> cursor_{0};
  std::size_t capacity_ = 0;
  bool with_distances_;
  std::vector<std::uint32_t> from_;
  std::vector<std::uint32_t> to_;
  std::vector<float> distance_;
  std::uint64_t growths_ = 0;
  std::size_t peak_bytes_ = 0;
};

/// A worker's private edge batch of fixed capacity.
class EdgeBuffer {
 public:
  EdgeBuffer(std::size_t capacity, bool with_distances);

  void push(std::uint32_t a, std::uint32_t b, float d, SharedEdgeSink& sink) {
    from_.push_back(a);
    to_.push_back(b);
    if (with_distances_) distance_.push_back(d);
    if (from_.size() >= capacity_) flush(sink);
  }
  void flush(SharedEdgeSink& sink);
  std::size_t bytes() const;

 private:
  std::size_t capacity_;
  bool with_distances_;
  std::vector<std::uint32_t> from_;
  std::vector<std::uint32_t> to_;
  std::vector<float> distance_;
};

/// reserve_and_commit: flush one batch into the sink.
inline void reserve_and_commit(SharedEdgeSink& sink, std::span<const std::uint32_t> from,
                               std::span<const std::uint32_t> to, std::span<const float> distance = {}) {
  sink.commit(from, to, distance);
}

/// Run `task(index, worker)` for every index in [0, count) exactly once.
/// One worker runs them in order; several workers claim them from a shared
/// atomic counter. Returns the number of tasks executed.
std::uint64_t schedule(std::uint64_t count, std::uint32_t workers,
                       const std::function<void(std::uint64_t, std::uint32_t)>& task);

/// Bucket pair (lo, hi), lo <= hi, for task t of a triangle over `live`
/// buckets including the diagonal.
inline std::pair<std::uint64_t, std::uint64_t> task_pair(std::uint64_t t) {
  const LocalPair p = decode_pair_same(t);
  return {p.i, p.j - 1};
}

/// Precomputed region, grid and Q table; reuse it to amortise the setup over
/// many graphs on one region.
class Generator {
 public:
  explicit Generator(GenConfig config);

  const GenConfig& config() const { return config_; }
  const BucketGrid& grid() const { return grid_; }
  const LinkModel& model() const { return model_; }
  const QTable& q_table() const { return q_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  GenResult run() const { return run(config_.seed); }
  GenResult run(std::uint64_t seed) const;

  /// Edges on an existing node store (must come from this generator's grid).
  GenResult run_edges(NodeStore nodes, std::uint64_t seed) const;

  /// Rough E[e]: each bucket pair's pair count times p at the distance
  /// between cell centres.
  double estimate_edges(const NodeStore& nodes) const;

 private:
  GenConfig config_;
  BucketGrid grid_;
  LinkModel model_;
  QTable q_;
  std::vector<std::string> warnings_;
};

/// Node generation followed by edge generation.
GenResult generate(const GenConfig& config);

}  // namespace sern
