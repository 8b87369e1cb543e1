#include "sern/model.hpp"

#include <cmath>
#include <sstream>

#include "sern/errors.hpp"

namespace sern {

Metric::Metric(MetricKind kind) : kind_(kind) {
  if (kind == MetricKind::custom) throw ParameterError("custom metric needs a function; use Metric::custom");
}

Metric Metric::custom(Function fn) {
  if (!fn) throw ParameterError("custom metric function is empty");
  Metric m;
  m.kind_ = MetricKind::custom;
  m.custom_ = std::move(fn);
  return m;
}

std::string Metric::name() const {
  switch (kind_) {
    case MetricKind::euclidean:
      return "l2";
    case MetricKind::manhattan:
      return "l1";
    case MetricKind::discrete:
      return "l0";
    case MetricKind::max:
      return "linf";
    case MetricKind::custom:
      return "custom";
  }
  return "?";
}

double longest_link(const Region& region, const Metric& metric) {
  const Box& b = region.bounds();
  switch (metric.kind()) {
    case MetricKind::euclidean:
      return std::hypot(b.width(), b.height());
    case MetricKind::manhattan:
      return b.width() + b.height();
    case MetricKind::max:
      return std::max(b.width(), b.height());
    case MetricKind::discrete:
      return 2.0;
    case MetricKind::custom:
      return metric({b.x0, b.y0}, {b.x1, b.y1});
  }
  return 0.0;
}

std::string to_string(DeterrenceKind kind) {
  switch (kind) {
    case DeterrenceKind::waxman:
      return "waxman";
    case DeterrenceKind::clipped_waxman:
      return "clipped_waxman";
    case DeterrenceKind::waxman_threshold:
      return "waxman_threshold";
    case DeterrenceKind::threshold:
      return "threshold";
    case DeterrenceKind::ger:
      return "ger";
    case DeterrenceKind::power_law:
      return "power_law";
    case DeterrenceKind::cauchy:
      return "cauchy";
    case DeterrenceKind::exponential:
      return "exponential";
    case DeterrenceKind::max_entropy:
      return "max_entropy";
    case DeterrenceKind::custom:
      return "custom";
  }
  return "?";
}

namespace {

constexpr int kGridPoints = 1000;

void require(bool ok, DeterrenceKind kind, const std::string& what) {
  if (!ok) throw ParameterError(to_string(kind) + ": " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// p(d_k) >= p(d_{k+1}) on kGridPoints evenly spaced points of [0, longest].
bool grid_monotone(const Deterrence& f, double longest) {
  double previous = f(0.0);
  for (int k = 1; k < kGridPoints; ++k) {
    const double current = f(longest * k / (kGridPoints - 1));
    if (current > previous * (1.0 + 1e-12) + 1e-300) return false;
    previous = current;
  }
  return true;
}

}  // namespace

Deterrence Deterrence::make(DeterrenceKind kind, const DeterrenceParams& params, double longest) {
  if (kind == DeterrenceKind::custom) throw ParameterError("custom deterrence needs a function; use Deterrence::custom");
  require(std::isfinite(longest) && longest > 0.0, kind, "longest link must be positive");
  const double q = params.q;
  switch (kind) {
    case DeterrenceKind::waxman:
    case DeterrenceKind::waxman_threshold:
      require(finite_nonneg(q) && q <= 1.0, kind, "q must lie in [0, 1]");
      require(finite_nonneg(params.s), kind, "s must be >= 0");
      if (kind == DeterrenceKind::waxman_threshold) require(finite_nonneg(params.r), kind, "r must be >= 0");
      break;
    case DeterrenceKind::clipped_waxman:
    case DeterrenceKind::max_entropy:
      require(finite_nonneg(q), kind, "q must be >= 0");
      require(finite_nonneg(params.s), kind, "s must be >= 0");
      break;
    case DeterrenceKind::threshold:
      require(finite_nonneg(q) && q <= 1.0, kind, "q must lie in [0, 1]");
      require(finite_nonneg(params.r), kind, "r must be >= 0");
      break;
    case DeterrenceKind::ger:
      require(finite_nonneg(q) && q <= 1.0, kind, "q must lie in [0, 1]");
      break;
    case DeterrenceKind::power_law:
      require(finite_nonneg(q) && q <= 1.0, kind, "q must lie in [0, 1]");
      require(finite_nonneg(params.theta1), kind, "theta1 must be >= 0");
      require(finite_nonneg(params.theta2), kind, "theta2 must be >= 0");
      break;
    case DeterrenceKind::cauchy:
      require(finite_nonneg(q) && q <= 1.0, kind, "q must lie in [0, 1]");
      require(finite_nonneg(params.theta1), kind, "theta1 must be >= 0");
      break;
    case DeterrenceKind::exponential:
      require(finite_nonneg(q), kind, "q must be >= 0");
      break;
    case DeterrenceKind::custom:
      break;
  }

  Deterrence f;
  f.kind_ = kind;
  f.params_ = params;
  f.longest_ = longest;
  if (kind == DeterrenceKind::exponential) {
    f.monotone_ = false;
    for (int k = 0; k < kGridPoints; ++k) {
      const double d = longest * k / kGridPoints;
      if (q * std::exp(-d) / (longest - d) > 1.0) {
        std::ostringstream msg;
        msg << "exponential: link probability exceeds 1 from d = " << d << " up to L = " << longest
            << "; clamped to 1";
        f.warnings_.push_back(msg.str());
        break;
      }
    }
    return f;
  }
  require(grid_monotone(f, longest), kind, "link probability is not non-increasing");
  return f;
}

Deterrence Deterrence::custom(Function fn, double longest) {
  if (!fn) throw ParameterError("custom deterrence function is empty");
  if (!(std::isfinite(longest) && longest > 0.0)) throw ParameterError("custom: longest link must be positive");
  Deterrence f;
  f.kind_ = DeterrenceKind::custom;
  f.longest_ = longest;
  f.custom_ = std::move(fn);
  f.monotone_ = grid_monotone(f, longest);
  if (!f.monotone_) {
    f.warnings_.push_back("custom link probability is not non-increasing; only the naive algorithm can use it");
  }
  return f;
}

double Deterrence::bound_from(double min_distance) const {
  if (kind_ == DeterrenceKind::exponential) {
    // q e^{-d} / (L - d) grows without bound as d -> L, so the clamped
    // supremum over [D, L) is 1 whenever that interval is non-empty.
    return params_.q > 0.0 && min_distance < longest_ ? 1.0 : 0.0;
  }
  return std::clamp((*this)(min_distance), 0.0, 1.0);
}

QTable build_q_table(const LinkModel& model, const BucketGrid& grid) {
  const std::uint32_t cols = grid.cols();
  const std::uint32_t rows = grid.rows();
  std::vector<double> entries(static_cast<std::size_t>(cols) * rows);
  for (std::uint32_t a = 0; a < cols; ++a) {
    for (std::uint32_t b = 0; b < rows; ++b) {
      const double d = min_bucket_distance(grid.side(), a, b, model.metric.kind()) * (1.0 - 1e-12);
      entries[static_cast<std::size_t>(a) * rows + b] = std::clamp(model.deterrence.bound_from(d), 0.0, 1.0);
    }
  }
  return QTable(cols, rows, std::move(entries));
}

}  // namespace sern
