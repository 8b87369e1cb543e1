#pragma once

#include <string>

#include "sern/engine.hpp"
#include "sern/geometry.hpp"
#include "sern/model.hpp"

namespace sern {

/// "rect:W,H", "ellipse:A,B" or "polygon:PATH".
Region parse_region(const std::string& text);

/// "l2", "l1", "l0" or "linf" (long names euclidean/manhattan/discrete/max also accepted).
Metric parse_metric(const std::string& text);

/// waxman, clipped_waxman, waxman_threshold, threshold, ger, power_law,
/// cauchy, exponential, max_entropy. Dashes may replace underscores.
DeterrenceKind parse_deterrence(const std::string& text);

/// naive, qjump or bucket.
Algorithm parse_algorithm(const std::string& text);

}  // namespace sern
