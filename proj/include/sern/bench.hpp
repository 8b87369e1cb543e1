#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sern/engine.hpp"

namespace sern {

enum class SweepDimension { nodes, decay, grid, threads };

SweepDimension parse_sweep_dimension(const std::string& text);
std::string to_string(SweepDimension dimension);

struct SweepParams {
  GenConfig base;
  std::uint32_t repetitions = 10;
  /// When positive and the model is Waxman, q is re-solved at every point so
  /// that the expected mean degree stays at this value.
  double target_degree = 1.0;
  std::uint64_t gtilde_samples = 200000;
  std::string name = "sweep";
};

struct SweepRow {
  std::string sweep;
  double param = 0.0;
  std::uint64_t n = 0;
  std::uint64_t e = 0;
  std::uint32_t grid = 0;
  std::uint32_t threads = 0;
  double seconds = 0.0;  // best of the repetitions
};

/// Time generation at each point of one dimension, keeping the minimum wall
/// time over the repetitions. Throws ParameterError for an empty point list.
std::vector<SweepRow> sweep(SweepDimension dimension, const SweepParams& params, std::span<const double> points);

/// sweep_name,param,n,e,M,threads,seconds
void write_csv(std::ostream& out, std::span<const SweepRow> rows, bool header = true);

}  // namespace sern
