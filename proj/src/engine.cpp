#include "sern/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <new>
#include <thread>

#include "edge_kernels.hpp"
#include "sern/errors.hpp"

namespace sern {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::naive:
      return "naive";
    case Algorithm::qjump:
      return "qjump";
    case Algorithm::bucket:
      return "bucket";
  }
  return "?";
}

void GenConfig::validate() const {
  if (n > kMaxNodes) throw ParameterError("node count must be below 2^32");
  if (grid_size < 1) throw ParameterError("grid size must be at least 1");
  if (workers < 1) throw ParameterError("worker count must be at least 1");
  if (buffer < 1) throw ParameterError("buffer capacity must be at least 1");
  if (histogram_bins < 1) throw ParameterError("histogram needs at least one bin");
  if (model.kind == DeterrenceKind::custom && !model.custom) throw ParameterError("custom model needs a function");
}

// --- SharedEdgeSink ---------------------------------------------------------

SharedEdgeSink::SharedEdgeSink(std::size_t capacity, bool with_distances)
    : capacity_(std::max<std::size_t>(capacity, 1)), with_distances_(with_distances) {
  from_.resize(capacity_);
  to_.resize(capacity_);
  if (with_distances_) distance_.resize(capacity_);
  peak_bytes_ = capacity_ * (with_distances_ ? 12 : 8);
}

std::size_t SharedEdgeSink::capacity() const {
  std::shared_lock lock(mutex_);
  return capacity_;
}

void SharedEdgeSink::grow(std::size_t needed) {
  const auto grown = static_cast<std::size_t>(static_cast<double>(capacity_) * 1.5);
  const std::size_t target = std::max(needed, grown);
  from_.resize(target);
  to_.resize(target);
  if (with_distances_) distance_.resize(target);
  capacity_ = target;
  ++growths_;
  peak_bytes_ = std::max(peak_bytes_, capacity_ * (with_distances_ ? 12 : 8));
}

void SharedEdgeSink::commit(std::span<const std::uint32_t> from, std::span<const std::uint32_t> to,
                            std::span<const float> distance) {
  const std::size_t length = from.size();
  if (length == 0) return;
  auto copy = [&](std::size_t start) {
    std::copy(from.begin(), from.end(), from_.begin() + static_cast<std::ptrdiff_t>(start));
    std::copy(to.begin(), to.end(), to_.begin() + static_cast<std::ptrdiff_t>(start));
    if (with_distances_) {
      std::copy(distance.begin(), distance.end(), distance_.begin() + static_cast<std::ptrdiff_t>(start));
    }
  };

  std::size_t start;
  {
    std::shared_lock lock(mutex_);
    start = cursor_.fetch_add(length);
    if (start + length <= capacity_) {
      copy(start);
      return;
    }
  }
  // Our range is reserved but lies past the end; growing needs every
  // in-flight copy to finish first, which the exclusive lock guarantees.
  std::unique_lock lock(mutex_);
  if (start + length > capacity_) grow(start + length);
  copy(start);
}

EdgeStore SharedEdgeSink::release() {
  std::unique_lock lock(mutex_);
  const std::size_t length = cursor_.load();
  EdgeStore edges;
  edges.with_distances = with_distances_;
  from_.resize(length);
  to_.resize(length);
  from_.shrink_to_fit();
  to_.shrink_to_fit();
  edges.from = std::move(from_);
  edges.to = std::move(to_);
  if (with_distances_) {
    distance_.resize(length);
    distance_.shrink_to_fit();
    edges.distance = std::move(distance_);
  }
  capacity_ = 0;
  cursor_ = 0;
  return edges;
}

EdgeBuffer::EdgeBuffer(std::size_t capacity, bool with_distances)
    : capacity_(std::max<std::size_t>(capacity, 1)), with_distances_(with_distances) {
  from_.reserve(capacity_);
  to_.reserve(capacity_);
  if (with_distances_) distance_.reserve(capacity_);
}

void EdgeBuffer::flush(SharedEdgeSink& sink) {
  sink.commit(from_, to_, distance_);
  from_.clear();
  to_.clear();
  distance_.clear();
}

std::size_t EdgeBuffer::bytes() const {
  return (from_.capacity() + to_.capacity()) * sizeof(std::uint32_t) + distance_.capacity() * sizeof(float);
}

// --- scheduling ---------------------------------------------------------------

std::uint64_t schedule(std::uint64_t count, std::uint32_t workers,
                       const std::function<void(std::uint64_t, std::uint32_t)>& task) {
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < count; ++t) task(t, 0);
    return count;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> executed{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            const std::uint64_t t = next.fetch_add(1, std::memory_order_relaxed);
            if (t >= count) break;
            task(t, w);
            executed.fetch_add(1, std::memory_order_relaxed);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return executed.load();
}

// --- Generator ----------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Deterrence build_deterrence(const GenConfig& config) {
  const double longest = longest_link(config.region, config.metric);
  if (config.model.kind == DeterrenceKind::custom) return Deterrence::custom(config.model.custom, longest);
  return Deterrence::make(config.model.kind, config.model.params, longest);
}

void merge(EdgeGenCounters& into, const EdgeGenCounters& from) {
  into.hits += from.hits;
  into.accepted += from.accepted;
  into.tasks += from.tasks;
  into.skipped += from.skipped;
}

std::vector<std::uint32_t> live_buckets(const NodeStore& nodes) {
  std::vector<std::uint32_t> live;
  for (std::uint32_t b = 0; b < nodes.counts.size(); ++b) {
    if (nodes.counts[b] > 0) live.push_back(b);
  }
  return live;
}

}  // namespace

Generator::Generator(GenConfig config)
    : config_(std::move(config)),
      grid_((config_.validate(), BucketGrid::cover(config_.region, config_.grid_size))),
      model_{config_.metric, build_deterrence(config_)},
      q_(build_q_table(model_, grid_)),
      warnings_(model_.deterrence.warnings()) {}

double Generator::estimate_edges(const NodeStore& nodes) const {
  const auto live = live_buckets(nodes);
  double total = 0.0;
  for (std::size_t a = 0; a < live.size(); ++a) {
    const double count_a = nodes.counts[live[a]];
    const Box box_a = grid_.cell_box(live[a]);
    total += count_a * (count_a - 1.0) / 2.0 * model_.deterrence(0.5 * grid_.side());
    for (std::size_t b = a + 1; b < live.size(); ++b) {
      const Box box_b = grid_.cell_box(live[b]);
      const Point ca{0.5 * (box_a.x0 + box_a.x1), 0.5 * (box_a.y0 + box_a.y1)};
      const Point cb{0.5 * (box_b.x0 + box_b.x1), 0.5 * (box_b.y0 + box_b.y1)};
      total += count_a * nodes.counts[live[b]] * model_.probability(ca, cb);
    }
  }
  return total;
}

GenResult Generator::run(std::uint64_t seed) const {
  const auto start = Clock::now();
  NodeGenStats node_stats;
  NodeStore nodes;
  try {
    nodes = generate_nodes(config_.region, grid_, config_.n, seed, config_.workers, &node_stats);
  } catch (const std::bad_alloc&) {
    throw ResourceError("out of memory allocating " + std::to_string(config_.n) + " nodes");
  }
  const double node_seconds = seconds_since(start);
  GenResult result = run_edges(std::move(nodes), seed);
  result.stats.node_rejections = node_stats.rejections;
  result.stats.node_seconds = node_seconds;
  return result;
}

GenResult Generator::run_edges(NodeStore nodes, std::uint64_t seed) const {
  if (nodes.counts.size() != grid_.size()) throw ParameterError("node store was not built on this generator's grid");
  if (nodes.size() > kNaiveLimit && config_.algorithm == Algorithm::naive && !config_.allow_large_naive) {
    throw ParameterError("naive algorithm refuses more than 100000 nodes without the override");
  }

  GenResult result;
  GenStats& stats = result.stats;
  stats.warnings = warnings_;
  stats.algorithm = config_.algorithm;
  if (!model_.deterrence.supports_bounds() && stats.algorithm != Algorithm::naive) {
    stats.warnings.push_back("link probability has no usable upper bound; falling back to the naive algorithm");
    stats.algorithm = Algorithm::naive;
    if (nodes.size() > kNaiveLimit && !config_.allow_large_naive) {
      throw ParameterError("naive fallback refuses more than 100000 nodes without the override");
    }
  }
  const Algorithm algorithm = stats.algorithm;
  const std::uint32_t workers = algorithm == Algorithm::bucket ? config_.workers : 1;
  if (workers != config_.workers) {
    stats.warnings.push_back(to_string(algorithm) + " runs on a single worker");
  }

  const auto start = Clock::now();
  const bool with_d = config_.with_distances;
  const std::uint32_t n = nodes.size();
  const double total_pairs = static_cast<double>(n) * (n > 0 ? n - 1 : 0) / 2.0;
  const double estimate = std::min(total_pairs, 1.25 * estimate_edges(nodes));
  const auto reserve = static_cast<std::size_t>(std::min(estimate, 2147483648.0));

  std::vector<Mwc> rngs;
  for (std::uint32_t w = 0; w < workers; ++w) rngs.emplace_back(derive_seed(seed, Stream::edges, w));
  std::vector<EdgeGenCounters> counters(workers);
  const auto live = live_buckets(nodes);
  const double p_max = model_.deterrence.supports_bounds() ? model_.deterrence.max_probability() : 1.0;

  // Sequential driver in row-major bucket order.
  auto run_single = [&](auto&& emit) {
    Mwc& rng = rngs[0];
    switch (algorithm) {
      case Algorithm::naive:
        detail::naive_pairs(nodes, model_, rng, emit, counters[0]);
        break;
      case Algorithm::qjump:
        detail::same_bucket_pairs(nodes, 0, n, p_max, model_, rng, emit, counters[0]);
        break;
      case Algorithm::bucket:
        for (std::size_t a = 0; a < live.size(); ++a) {
          for (std::size_t b = a; b < live.size(); ++b) {
            detail::bucket_pair(nodes, grid_, q_, live[a], live[b], model_, rng, emit, counters[0]);
          }
        }
        break;
    }
  };
  const std::uint64_t task_count = static_cast<std::uint64_t>(live.size()) * (live.size() + 1) / 2;
  auto run_parallel = [&](auto&& make_emit) {
    return schedule(task_count, workers, [&](std::uint64_t t, std::uint32_t w) {
      const auto [a, b] = task_pair(t);
      detail::bucket_pair(nodes, grid_, q_, live[a], live[b], model_, rngs[w], make_emit(w), counters[w]);
    });
  };

  std::size_t overhead = grid_.overhead_bytes() + q_.overhead_bytes() +
                         (nodes.counts.size() + nodes.offsets.size() + live.size()) * sizeof(std::uint32_t);

  try {
    if (config_.stats_only) {
      std::vector<std::uint32_t> degrees(n, 0);
      std::vector<LengthHistogram> lengths(workers, LengthHistogram(model_.deterrence.longest(), config_.histogram_bins));
      if (workers == 1) {
        run_single([&](std::uint32_t a, std::uint32_t b, double d) {
          ++degrees[a];
          ++degrees[b];
          lengths[0].add(d);
        });
      } else {
        run_parallel([&](std::uint32_t w) {
          return [&, w](std::uint32_t a, std::uint32_t b, double d) {
            std::atomic_ref<std::uint32_t>(degrees[a]).fetch_add(1, std::memory_order_relaxed);
            std::atomic_ref<std::uint32_t>(degrees[b]).fetch_add(1, std::memory_order_relaxed);
            lengths[w].add(d);
          };
        });
      }
      GraphStats summary{n, 0, 0.0, std::move(degrees), {}, std::move(lengths[0])};
      for (std::uint32_t w = 1; w < workers; ++w) summary.lengths.merge(lengths[w]);
      for (const auto c : summary.lengths.counts()) summary.e += c;
      summary.mean_degree = n == 0 ? 0.0 : 2.0 * static_cast<double>(summary.e) / n;
      summary.degree_histogram = degree_histogram(summary.degrees);
      overhead += summary.degrees.capacity() * sizeof(std::uint32_t);
      result.summary = std::move(summary);
      result.edges.with_distances = with_d;
    } else if (workers == 1) {
      EdgeStore& edges = result.edges;
      edges.with_distances = with_d;
      edges.from.reserve(reserve);
      edges.to.reserve(reserve);
      if (with_d) edges.distance.reserve(reserve);
      run_single([&](std::uint32_t a, std::uint32_t b, double d) { edges.push(a, b, static_cast<float>(d)); });
      stats.memory.peak_edge_bytes = edges.payload_bytes();
      edges.from.shrink_to_fit();
      edges.to.shrink_to_fit();
      edges.distance.shrink_to_fit();
    } else {
      SharedEdgeSink sink(reserve, with_d);
      std::vector<EdgeBuffer> buffers;
      for (std::uint32_t w = 0; w < workers; ++w) buffers.emplace_back(config_.buffer, with_d);
      run_parallel([&](std::uint32_t w) {
        return [&, w](std::uint32_t a, std::uint32_t b, double d) {
          buffers[w].push(a, b, static_cast<float>(d), sink);
        };
      });
      for (auto& buffer : buffers) {
        buffer.flush(sink);
        overhead += buffer.bytes();
      }
      stats.growth_events = sink.growth_events();
      stats.memory.peak_edge_bytes = sink.peak_bytes();
      result.edges = sink.release();
    }
  } catch (const std::bad_alloc&) {
    throw ResourceError("out of memory while generating edges");
  }

  EdgeGenCounters total;
  for (const auto& c : counters) merge(total, c);
  stats.nodes = n;
  stats.edges = config_.stats_only ? result.summary->e : result.edges.size();
  stats.hits = total.hits;
  stats.edge_rejections = total.hits - total.accepted;
  stats.tasks = total.tasks;
  stats.skipped_tasks = total.skipped;
  stats.edge_seconds = seconds_since(start);
  stats.memory.node_bytes = nodes.payload_bytes();
  stats.memory.edge_bytes = result.edges.payload_bytes();
  stats.memory.overhead_bytes = overhead;
  result.nodes = std::move(nodes);
  return result;
}

GenResult generate(const GenConfig& config) {
  config.validate();
  return Generator(config).run();
}

}  // namespace sern
