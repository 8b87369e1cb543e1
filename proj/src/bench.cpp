#include "sern/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "sern/analysis.hpp"
#include "sern/errors.hpp"

namespace sern {

SweepDimension parse_sweep_dimension(const std::string& text) {
  if (text == "n" || text == "nodes") return SweepDimension::nodes;
  if (text == "s" || text == "decay") return SweepDimension::decay;
  if (text == "M" || text == "m" || text == "grid") return SweepDimension::grid;
  if (text == "threads" || text == "T") return SweepDimension::threads;
  throw ParameterError("unknown sweep dimension '" + text + "'");
}

std::string to_string(SweepDimension dimension) {
  switch (dimension) {
    case SweepDimension::nodes:
      return "n";
    case SweepDimension::decay:
      return "s";
    case SweepDimension::grid:
      return "M";
    case SweepDimension::threads:
      return "threads";
  }
  return "?";
}

std::vector<SweepRow> sweep(SweepDimension dimension, const SweepParams& params, std::span<const double> points) {
  if (points.empty()) throw ParameterError("sweep needs at least one point");
  if (params.repetitions < 1) throw ParameterError("sweep needs at least one repetition");

  const bool fix_degree = params.target_degree > 0.0 && params.base.model.kind == DeterrenceKind::waxman;
  std::map<double, double> gtilde_cache;
  auto gtilde = [&](double s) {
    const auto it = gtilde_cache.find(s);
    if (it != gtilde_cache.end()) return it->second;
    Mwc rng(derive_seed(params.base.seed, Stream::analysis, gtilde_cache.size()));
    const double g = estimate_gtilde(params.base.region, params.base.metric, s, params.gtilde_samples, rng).value;
    gtilde_cache.emplace(s, g);
    return g;
  };

  std::vector<SweepRow> rows;
  for (const double point : points) {
    GenConfig config = params.base;
    switch (dimension) {
      case SweepDimension::nodes:
        config.n = static_cast<std::uint64_t>(std::llround(point));
        break;
      case SweepDimension::decay:
        config.model.params.s = point;
        break;
      case SweepDimension::grid:
        config.grid_size = static_cast<std::uint32_t>(std::lround(point));
        break;
      case SweepDimension::threads:
        config.workers = static_cast<std::uint32_t>(std::lround(point));
        break;
    }
    if (fix_degree && config.n >= 2) {
      config.model.params.q = std::min(1.0, q_for_degree(config.n, params.target_degree, gtilde(config.model.params.s)));
    }

    const Generator generator(config);
    SweepRow row{params.name, point, config.n, 0, config.grid_size, config.workers,
                 std::numeric_limits<double>::infinity()};
    for (std::uint32_t r = 0; r < params.repetitions; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const GenResult result = generator.run(config.seed + r);
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed < row.seconds) {
        row.seconds = elapsed;
        row.e = result.stats.edges;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows, bool header) {
  if (header) out << "sweep_name,param,n,e,M,threads,seconds\n";
  for (const auto& r : rows) {
    out << r.sweep << ',' << r.param << ',' << r.n << ',' << r.e << ',' << r.grid << ',' << r.threads << ','
        << r.seconds << '\n';
  }
}

}  // namespace sern
