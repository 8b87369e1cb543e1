#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sern/geometry.hpp"

namespace sern {

/// Distance between two points under one of the standard metrics or a
/// caller-supplied function.
class Metric {
 public:
  using Function = std::function<double(Point, Point)>;

  Metric(MetricKind kind = MetricKind::euclidean);  // NOLINT(google-explicit-constructor)
  static Metric custom(Function fn);

  MetricKind kind() const { return kind_; }
  std::string name() const;

  double operator()(Point a, Point b) const {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    switch (kind_) {
      case MetricKind::euclidean:
        return std::sqrt(dx * dx + dy * dy);
      case MetricKind::manhattan:
        return std::abs(dx) + std::abs(dy);
      case MetricKind::max:
        return std::max(std::abs(dx), std::abs(dy));
      case MetricKind::discrete:
        return static_cast<double>((dx != 0.0) + (dy != 0.0));
      case MetricKind::custom:
        return custom_(a, b);
    }
    return 0.0;
  }

 private:
  MetricKind kind_;
  Function custom_;
};

inline double distance(const Metric& metric, Point a, Point b) { return metric(a, b); }

/// Longest possible link: the metric diameter of the region's bounding box
/// (2 for the discrete metric).
double longest_link(const Region& region, const Metric& metric);

enum class DeterrenceKind {
  waxman,
  clipped_waxman,
  waxman_threshold,
  threshold,
  ger,
  power_law,
  cauchy,
  exponential,
  max_entropy,
  custom,
};

std::string to_string(DeterrenceKind kind);

struct DeterrenceParams {
  double q = 1.0;
  double s = 0.0;
  double r = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// Link probability as a function of distance.
///
///   waxman            q e^{-s d}
///   clipped_waxman    min(q e^{-s d}, 1)
///   waxman_threshold  q e^{-s d} H(r - d)
///   threshold         q H(r - d)
///   ger               q
///   power_law         q (1 + theta1 d)^{-theta2}
///   cauchy            q / (1 + theta1 d^2)
///   exponential       q e^{-d} / (L - d), clamped to [0, 1], 0 for d >= L
///   max_entropy       q e^{-s d} / (1 + q e^{-s d})
///
/// H(0) = 1, so d = r is still connectable. Every form except exponential
/// is non-increasing; exponential rises towards L and is bounded by 1.
class Deterrence {
 public:
  using Function = std::function<double(double)>;

  /// Throws ParameterError when a parameter is outside its range or a
  /// monotone form fails the 1000-point grid check over [0, longest].
  static Deterrence make(DeterrenceKind kind, const DeterrenceParams& params, double longest);

  /// Caller-supplied function, clamped to [0, 1]. It is grid-checked for
  /// monotonicity; non-monotone functions are accepted but `monotone()`
  /// reports false and only the naive algorithm may use them.
  static Deterrence custom(Function fn, double longest);

  DeterrenceKind kind() const { return kind_; }
  const DeterrenceParams& params() const { return params_; }
  double longest() const { return longest_; }
  bool monotone() const { return monotone_; }
  /// True when bound_from() is a valid upper bound, which the q-jumping and
  /// bucket algorithms need. False only for non-monotone custom functions.
  bool supports_bounds() const { return monotone_ || kind_ == DeterrenceKind::exponential; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  double operator()(double d) const {
    const double q = params_.q;
    switch (kind_) {
      case DeterrenceKind::waxman:
        return q * std::exp(-params_.s * d);
      case DeterrenceKind::clipped_waxman:
        return std::min(q * std::exp(-params_.s * d), 1.0);
      case DeterrenceKind::waxman_threshold:
        return d <= params_.r ? q * std::exp(-params_.s * d) : 0.0;
      case DeterrenceKind::threshold:
        return d <= params_.r ? q : 0.0;
      case DeterrenceKind::ger:
        return q;
      case DeterrenceKind::power_law:
        return q * std::pow(1.0 + params_.theta1 * d, -params_.theta2);
      case DeterrenceKind::cauchy:
        return q / (1.0 + params_.theta1 * d * d);
      case DeterrenceKind::exponential: {
        if (d >= longest_) return 0.0;
        return std::clamp(q * std::exp(-d) / (longest_ - d), 0.0, 1.0);
      }
      case DeterrenceKind::max_entropy: {
        const double w = q * std::exp(-params_.s * d);
        return w / (1.0 + w);
      }
      case DeterrenceKind::custom:
        return std::clamp(custom_(d), 0.0, 1.0);
    }
    return 0.0;
  }

  /// An upper bound on p(d) over all d >= min_distance: p(min_distance) for
  /// monotone forms, the suprema of the exponential form otherwise.
  double bound_from(double min_distance) const;

  /// sup over all d >= 0.
  double max_probability() const { return bound_from(0.0); }

 private:
  DeterrenceKind kind_ = DeterrenceKind::ger;
  DeterrenceParams params_;
  double longest_ = 1.0;
  bool monotone_ = true;
  Function custom_;
  std::vector<std::string> warnings_;
};

/// Metric plus deterrence: everything needed to turn node positions into link
/// probabilities.
struct LinkModel {
  Metric metric;
  Deterrence deterrence;

  double probability(Point a, Point b) const { return deterrence(metric(a, b)); }
};

/// Upper-bound link probability for every bucket offset (|di|, |dj|).
class QTable {
 public:
  QTable() = default;
  QTable(std::uint32_t cols, std::uint32_t rows, std::vector<double> entries)
      : cols_(cols), rows_(rows), entries_(std::move(entries)) {}

  std::uint32_t cols() const { return cols_; }
  std::uint32_t rows() const { return rows_; }
  double at(std::uint32_t di, std::uint32_t dj) const { return entries_[static_cast<std::size_t>(di) * rows_ + dj]; }
  std::size_t overhead_bytes() const { return entries_.size() * sizeof(double); }

 private:
  std::uint32_t cols_ = 0;
  std::uint32_t rows_ = 0;
  std::vector<double> entries_;
};

/// Q[a][b] = clamp(bound_from(D(a, b)), 0, 1). D is shrunk by a relative
/// 1e-12 so that rounding in coordinate differences can never push a real
/// distance below it.
QTable build_q_table(const LinkModel& model, const BucketGrid& grid);

}  // namespace sern
