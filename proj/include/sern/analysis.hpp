#pragma once

#include <cstdint>
#include <vector>

#include "sern/edgegen.hpp"
#include "sern/geometry.hpp"
#include "sern/model.hpp"
#include "sern/nodegen.hpp"
#include "sern/rng.hpp"

namespace sern {

inline constexpr std::size_t kDefaultBins = 64;

/// Equal-width histogram of link lengths over [0, max_length]; lengths at
/// or beyond max_length land in the last bin.
class LengthHistogram {
 public:
  explicit LengthHistogram(double max_length = 1.0, std::size_t bins = kDefaultBins);

  void add(double d) { ++counts_[bin(d)]; }
  std::size_t bin(double d) const {
    const double t = d * scale_;
    if (!(t > 0.0)) return 0;
    const auto k = static_cast<std::size_t>(t);
    return k < counts_.size() ? k : counts_.size() - 1;
  }
  void merge(const LengthHistogram& other);

  double max_length() const { return max_length_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  double max_length_;
  double scale_;
  std::vector<std::uint64_t> counts_;
};

struct GraphStats {
  std::uint64_t n = 0;
  std::uint64_t e = 0;
  double mean_degree = 0.0;
  std::vector<std::uint32_t> degrees;
  /// degree_histogram[k] = number of nodes of degree k.
  std::vector<std::uint64_t> degree_histogram;
  LengthHistogram lengths;
};

/// Histogram of degree values from a degree array.
std::vector<std::uint64_t> degree_histogram(const std::vector<std::uint32_t>& degrees);

/// Degrees from the edge list; lengths from stored distances when present,
/// recomputed with `metric` otherwise. Throws IntegrityError for ids >= n.
GraphStats compute_stats(const NodeStore& nodes, const EdgeStore& edges, const Metric& metric, double max_length,
                         std::size_t bins = kDefaultBins);

struct LaplaceEstimate {
  double s = 0.0;
  double value = 1.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Monte Carlo E[exp(-s d)] for d the distance between two independent
/// uniform points of the region: the Laplace transform of the line-picking
/// density at s.
LaplaceEstimate estimate_gtilde(const Region& region, const Metric& metric, double s, std::uint64_t samples,
                                Mwc& rng);

/// Mean degree of a Waxman graph: (n - 1) q G(s).
double expected_degree(std::uint64_t n, double q, double gtilde);

/// n (n - 1) q G(s) / 2.
double expected_edges(std::uint64_t n, double q, double gtilde);

/// The q that gives mean degree `degree` for n nodes; not clamped to 1.
double q_for_degree(std::uint64_t n, double degree, double gtilde);

}  // namespace sern
