// Command-line generator: builds one graph and writes it in the chosen format.
// Exit codes: 0 success, 2 usage error, 3 resource error, 4 I/O error.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "sern/config.hpp"
#include "sern/engine.hpp"
#include "sern/errors.hpp"
#include "sern/io.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kResource = 3;
constexpr int kIo = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatially embedded random network generator"};

  std::uint64_t nodes = 1000;
  std::string model = "waxman";
  sern::DeterrenceParams params;
  std::string metric = "l2";
  std::string region = "rect:1,1";
  std::uint32_t buckets = sern::kDefaultGridSize;
  std::string algorithm = "bucket";
  std::uint32_t threads = 1;
  std::uint64_t buffer = sern::kDefaultBuffer;
  std::uint64_t seed = 1;
  bool distances = false;
  std::string format = "edgelist";
  std::string output = "-";
  bool json_stats = false;
  bool force_naive = false;

  app.add_option("--nodes", nodes, "Number of nodes")->check(CLI::Range(std::uint64_t{0}, sern::kMaxNodes));
  app.add_option("--model", model,
                 "waxman, clipped_waxman, waxman_threshold, threshold, ger, power_law, cauchy, exponential, "
                 "max_entropy");
  app.add_option("--q", params.q, "Link probability scale q");
  app.add_option("--s", params.s, "Distance decay s");
  app.add_option("--r", params.r, "Threshold radius r");
  app.add_option("--theta1", params.theta1, "Shape parameter theta1");
  app.add_option("--theta2", params.theta2, "Shape parameter theta2");
  app.add_option("--metric", metric, "l2, l1, l0 or linf");
  app.add_option("--region", region, "rect:W,H | ellipse:A,B | polygon:PATH");
  app.add_option("--buckets", buckets, "Grid size M")->check(CLI::PositiveNumber);
  app.add_option("--algorithm", algorithm, "naive, qjump or bucket");
  app.add_option("--threads", threads, "Worker count")->check(CLI::PositiveNumber);
  app.add_option("--buffer", buffer, "Edges per worker buffer")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master seed");
  app.add_flag("--distances", distances, "Store and write link lengths");
  app.add_option("--format", format, "graphml, edgelist, binary or stats");
  app.add_option("--output", output, "Output path, '-' for standard output");
  app.add_flag("--json-stats", json_stats, "Print statistics as JSON");
  app.add_flag("--force-naive", force_naive, "Allow the naive algorithm above 100000 nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  sern::GenConfig config;
  sern::OutputFormat out_format;
  try {
    config.n = nodes;
    config.model.kind = sern::parse_deterrence(model);
    config.model.params = params;
    config.metric = sern::parse_metric(metric);
    config.region = sern::parse_region(region);
    config.grid_size = buckets;
    config.algorithm = sern::parse_algorithm(algorithm);
    config.workers = threads;
    config.buffer = buffer;
    config.seed = seed;
    config.with_distances = distances;
    config.allow_large_naive = force_naive;
    out_format = sern::parse_format(format);
    config.stats_only = out_format == sern::OutputFormat::stats;
  } catch (const sern::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  sern::GenResult result;
  try {
    result = sern::generate(config);
  } catch (const sern::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const sern::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResource;
  }

  try {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (out_format != sern::OutputFormat::stats && output != "-") {
      const auto mode = out_format == sern::OutputFormat::binary ? std::ios::out | std::ios::binary : std::ios::out;
      file.open(output, mode);
      if (!file) throw sern::IoError("cannot open " + output);
      out = &file;
    }
    switch (out_format) {
      case sern::OutputFormat::graphml:
        sern::write_graphml(*out, result.nodes, result.edges, distances);
        break;
      case sern::OutputFormat::edgelist:
        sern::write_edgelist(*out, result.nodes, result.edges);
        break;
      case sern::OutputFormat::binary:
        sern::write_binary(*out, result.nodes, result.edges);
        break;
      case sern::OutputFormat::stats:
        break;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }

  const sern::GraphStats* summary = result.summary ? &*result.summary : nullptr;
  if (json_stats) {
    std::cerr << sern::stats_json(result.stats, summary) << '\n';
  } else {
    sern::write_stats_text(std::cerr, result.stats, summary);
  }
  return 0;
}
