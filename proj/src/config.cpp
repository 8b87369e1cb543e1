#include "sern/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "sern/errors.hpp"

namespace sern {

namespace {

std::string normalise(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  return text;
}

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParameterError("bad number '" + text + "' in " + context);
  return value;
}

std::pair<double, double> parse_pair(const std::string& body, const std::string& context) {
  const auto comma = body.find(',');
  if (comma == std::string::npos) throw ParameterError(context + " expects two comma-separated numbers");
  return {parse_number(body.substr(0, comma), context), parse_number(body.substr(comma + 1), context)};
}

}  // namespace

Region parse_region(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParameterError("region must look like rect:W,H, ellipse:A,B or polygon:PATH");
  const std::string kind = normalise(text.substr(0, colon));
  const std::string body = text.substr(colon + 1);
  if (kind == "rect" || kind == "rectangle") {
    const auto [w, h] = parse_pair(body, "rect region");
    return Region::rectangle(w, h);
  }
  if (kind == "ellipse") {
    const auto [a, b] = parse_pair(body, "ellipse region");
    return Region::ellipse(a, b);
  }
  if (kind == "polygon") {
    if (body.empty()) throw ParameterError("polygon region needs a file path");
    return Region::polygon(Polygon::load(body));
  }
  throw ParameterError("unknown region kind '" + kind + "'");
}

Metric parse_metric(const std::string& text) {
  static const std::map<std::string, MetricKind> names = {
      {"l2", MetricKind::euclidean}, {"euclidean", MetricKind::euclidean}, {"l1", MetricKind::manhattan},
      {"manhattan", MetricKind::manhattan}, {"l0", MetricKind::discrete}, {"discrete", MetricKind::discrete},
      {"linf", MetricKind::max}, {"max", MetricKind::max}};
  const auto it = names.find(normalise(text));
  if (it == names.end()) throw ParameterError("unknown metric '" + text + "'");
  return it->second;
}

DeterrenceKind parse_deterrence(const std::string& text) {
  static const std::map<std::string, DeterrenceKind> names = {
      {"waxman", DeterrenceKind::waxman},
      {"clipped_waxman", DeterrenceKind::clipped_waxman},
      {"waxman_threshold", DeterrenceKind::waxman_threshold},
      {"threshold", DeterrenceKind::threshold},
      {"ger", DeterrenceKind::ger},
      {"power_law", DeterrenceKind::power_law},
      {"cauchy", DeterrenceKind::cauchy},
      {"exponential", DeterrenceKind::exponential},
      {"max_entropy", DeterrenceKind::max_entropy}};
  const auto it = names.find(normalise(text));
  if (it == names.end()) throw ParameterError("unknown model '" + text + "'");
  return it->second;
}

Algorithm parse_algorithm(const std::string& text) {
  const std::string name = normalise(text);
  if (name == "naive") return Algorithm::naive;
  if (name == "qjump" || name == "q_jump") return Algorithm::qjump;
  if (name == "bucket") return Algorithm::bucket;
  throw ParameterError("unknown algorithm '" + text + "'");
}

}  // namespace sern
