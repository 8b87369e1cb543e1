#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sern/analysis.hpp"
#include "sern/edgegen.hpp"
#include "sern/engine.hpp"
#include "sern/nodegen.hpp"

namespace sern {

enum class OutputFormat { graphml, edgelist, binary, stats };

OutputFormat parse_format(const std::string& text);

/// A graph as read back from a file. Files carry no bucket layout, so the
/// nodes come back as a single bucket.
struct Graph {
  NodeStore nodes;
  EdgeStore edges;
};

inline constexpr std::uint16_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryHeaderBytes = 24;

/// Shortest decimal that parses back to the same float.
std::string format_float(float v);

/// Undirected GraphML: nodes "n<k>" with float keys "x" and "y", edges with
/// optional key "d". Throws IoError when the stream fails; the output may be
/// partial in that case.
void write_graphml(std::ostream& out, const NodeStore& nodes, const EdgeStore& edges, bool include_distances);

/// "# nodes n", "# edges e", n lines "x y", then e lines "i j" or "i j d".
void write_edgelist(std::ostream& out, const NodeStore& nodes, const EdgeStore& edges);

/// Little-endian: "SERN", u16 version, u16 flags (bit 0 = distances), u64 n,
/// u64 e, then x[n] f32, y[n] f32, from[e] u32, to[e] u32, d[e] f32.
void write_binary(std::ostream& out, const NodeStore& nodes, const EdgeStore& edges);

/// Readers for the formats above; IntegrityError on malformed input.
Graph read_graphml(std::istream& in);
Graph read_edgelist(std::istream& in);
Graph read_binary(std::istream& in);

/// key: value lines.
void write_stats_text(std::ostream& out, const GenStats& stats, const GraphStats* summary = nullptr);
std::string stats_json(const GenStats& stats, const GraphStats* summary = nullptr);

}  // namespace sern
