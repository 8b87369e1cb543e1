#include "sern/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sern/errors.hpp"

namespace sern {

LengthHistogram::LengthHistogram(double max_length, std::size_t bins)
    : max_length_(max_length), scale_(bins / max_length), counts_(bins, 0) {
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  if (!(max_length > 0.0)) throw ParameterError("histogram range must be positive");
}

void LengthHistogram::merge(const LengthHistogram& other) {
  if (other.counts_.size() != counts_.size() || other.max_length_ != max_length_) {
    throw ParameterError("cannot merge histograms with different binning");
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
}

std::vector<std::uint64_t> degree_histogram(const std::vector<std::uint32_t>& degrees) {
  const std::uint32_t top = degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
  std::vector<std::uint64_t> histogram(degrees.empty() ? 0 : top + 1, 0);
  for (const auto d : degrees) ++histogram[d];
  return histogram;
}

GraphStats compute_stats(const NodeStore& nodes, const EdgeStore& edges, const Metric& metric, double max_length,
                         std::size_t bins) {
  GraphStats stats{nodes.size(), edges.size(), 0.0, {}, {}, LengthHistogram(max_length, bins)};
  stats.degrees.assign(nodes.size(), 0);
  const bool stored = edges.with_distances && edges.distance.size() == edges.size();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::uint32_t a = edges.from[k];
    const std::uint32_t b = edges.to[k];
    if (a >= nodes.size() || b >= nodes.size()) {
      throw IntegrityError("edge " + std::to_string(k) + " references a node id >= n");
    }
    ++stats.degrees[a];
    ++stats.degrees[b];
    stats.lengths.add(stored ? edges.distance[k] : metric(nodes.point(a), nodes.point(b)));
  }
  stats.degree_histogram = degree_histogram(stats.degrees);
  stats.mean_degree = stats.n == 0 ? 0.0 : 2.0 * static_cast<double>(stats.e) / static_cast<double>(stats.n);
  return stats;
}

LaplaceEstimate estimate_gtilde(const Region& region, const Metric& metric, double s, std::uint64_t samples,
                                Mwc& rng) {
  if (samples == 0) throw ParameterError("estimate needs at least one sample");
  LaplaceEstimate out{s, 1.0, 0.0, samples};
  if (s == 0.0) return out;
  // Welford running mean and variance.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t k = 1; k <= samples; ++k) {
    const Point a = sample_point(region, rng);
    const Point b = sample_point(region, rng);
    const double v = std::exp(-s * metric(a, b));
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  out.value = mean;
  if (samples > 1) {
    const double variance = m2 / static_cast<double>(samples - 1);
    out.std_error = std::sqrt(variance / static_cast<double>(samples));
  }
  return out;
}

double expected_degree(std::uint64_t n, double q, double gtilde) {
  if (n == 0) return 0.0;
  return static_cast<double>(n - 1) * q * gtilde;
}

double expected_edges(std::uint64_t n, double q, double gtilde) {
  return static_cast<double>(n) * expected_degree(n, q, gtilde) / 2.0;
}

double q_for_degree(std::uint64_t n, double degree, double gtilde) {
  if (n < 2 || !(gtilde > 0.0)) throw ParameterError("cannot solve for q with n < 2 or G <= 0");
  return degree / (static_cast<double>(n - 1) * gtilde);
}

}  // namespace sern
