#include "sern/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sern/errors.hpp"

namespace sern {

OutputFormat parse_format(const std::string& text) {
  if (text == "graphml") return OutputFormat::graphml;
  if (text == "edgelist") return OutputFormat::edgelist;
  if (text == "binary") return OutputFormat::binary;
  if (text == "stats" || text == "stats-only") return OutputFormat::stats;
  throw ParameterError("unknown format '" + text + "'");
}

std::string format_float(float v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

void check(std::ostream& out) {
  if (!out) throw IoError("write failed");
}

float parse_float(std::string_view text) {
  float v = 0.0F;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IntegrityError("bad number '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IntegrityError("bad integer '" + std::string(text) + "'");
  }
  return v;
}

Graph make_graph(std::vector<float> x, std::vector<float> y, EdgeStore edges) {
  Graph g;
  const auto n = static_cast<std::uint32_t>(x.size());
  g.nodes.x = std::move(x);
  g.nodes.y = std::move(y);
  g.nodes.counts = {n};
  g.nodes.offsets = {0};
  g.edges = std::move(edges);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (g.edges.from[k] >= n || g.edges.to[k] >= n) throw IntegrityError("edge references a missing node");
  }
  return g;
}

template <class T>
void write_array(std::ostream& out, const std::vector<T>& values) {
  static_assert(sizeof(T) == 4);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
  } else {
    for (const T v : values) {
      const auto bits = std::bit_cast<std::uint32_t>(v);
      const char bytes[4] = {static_cast<char>(bits), static_cast<char>(bits >> 8), static_cast<char>(bits >> 16),
                             static_cast<char>(bits >> 24)};
      out.write(bytes, 4);
    }
  }
}

template <class T>
std::vector<T> read_array(std::istream& in, std::uint64_t count) {
  std::vector<T> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * 4));
  if (!in) throw IntegrityError("binary file truncated");
  if constexpr (std::endian::native != std::endian::little) {
    for (T& v : values) {
      const auto b = std::bit_cast<std::uint32_t>(v);
      v = std::bit_cast<T>((b >> 24) | ((b >> 8) & 0xff00U) | ((b << 8) & 0xff0000U) | (b << 24));
    }
  }
  return values;
}

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int k = 0; k < bytes; ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(buf, bytes);
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int k = bytes - 1; k >= 0; --k) v = (v << 8) | p[k];
  return v;
}

// Attributes of one XML start tag: name="value" pairs.
std::map<std::string, std::string> attributes(std::string_view tag) {
  std::map<std::string, std::string> out;
  std::size_t pos = tag.find_first_of(" \t\r\n");
  while (pos != std::string_view::npos) {
    const auto eq = tag.find('=', pos);
    if (eq == std::string_view::npos) break;
    std::string_view key = tag.substr(pos, eq - pos);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.front()))) key.remove_prefix(1);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.remove_suffix(1);
    const auto open = tag.find_first_of("\"'", eq);
    if (open == std::string_view::npos) break;
    const auto close = tag.find(tag[open], open + 1);
    if (close == std::string_view::npos) throw IntegrityError("unterminated attribute in GraphML");
    out.emplace(std::string(key), std::string(tag.substr(open + 1, close - open - 1)));
    pos = close + 1;
  }
  return out;
}

}  // namespace

void write_graphml(std::ostream& out, const NodeStore& nodes, const EdgeStore& edges, bool include_distances) {
  const bool with_d = include_distances && edges.with_distances && edges.distance.size() == edges.size();
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
         "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
         "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
         "  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"float\"/>\n"
         "  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"float\"/>\n";
  if (with_d) out << "  <key id=\"d\" for=\"edge\" attr.name=\"d\" attr.type=\"float\"/>\n";
  out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (std::uint32_t k = 0; k < nodes.size(); ++k) {
    out << "    <node id=\"n" << k << "\"><data key=\"x\">" << format_float(nodes.x[k]) << "</data><data key=\"y\">"
        << format_float(nodes.y[k]) << "</data></node>\n";
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    out << "    <edge source=\"n" << edges.from[k] << "\" target=\"n" << edges.to[k] << "\"";
    if (with_d) {
      out << "><data key=\"d\">" << format_float(edges.distance[k]) << "</data></edge>\n";
    } else {
      out << "/>\n";
    }
  }
  out << "  </graph>\n</graphml>\n";
  out.flush();
  check(out);
}

void write_edgelist(std::ostream& out, const NodeStore& nodes, const EdgeStore& edges) {
  const bool with_d = edges.with_distances && edges.distance.size() == edges.size();
  out << "# nodes " << nodes.size() << "\n# edges " << edges.size() << "\n";
  for (std::uint32_t k = 0; k < nodes.size(); ++k) {
    out << format_float(nodes.x[k]) << ' ' << format_float(nodes.y[k]) << '\n';
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    out << edges.from[k] << ' ' << edges.to[k];
    if (with_d) out << ' ' << format_float(edges.distance[k]);
    out << '\n';
  }
  out.flush();
  check(out);
}

void write_binary(std::ostream& out, const NodeStore& nodes, const EdgeStore& edges) {
  const bool with_d = edges.with_distances && edges.distance.size() == edges.size();
  out.write("SERN", 4);
  put_le(out, kBinaryVersion, 2);
  put_le(out, with_d ? 1 : 0, 2);
  put_le(out, nodes.size(), 8);
  put_le(out, edges.size(), 8);
  write_array(out, nodes.x);
  write_array(out, nodes.y);
  write_array(out, edges.from);
  write_array(out, edges.to);
  if (with_d) write_array(out, edges.distance);
  out.flush();
  check(out);
}

Graph read_binary(std::istream& in) {
  unsigned char header[kBinaryHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kBinaryHeaderBytes);
  if (!in) throw IntegrityError("binary file shorter than its header");
  if (std::memcmp(header, "SERN", 4) != 0) throw IntegrityError("not a SERN binary file");
  const auto version = get_le(header + 4, 2);
  if (version != kBinaryVersion) throw IntegrityError("unsupported binary version " + std::to_string(version));
  const bool with_d = (get_le(header + 6, 2) & 1) != 0;
  const std::uint64_t n = get_le(header + 8, 8);
  const std::uint64_t e = get_le(header + 16, 8);
  if (n > kMaxNodes) throw IntegrityError("binary file node count too large");
  auto x = read_array<float>(in, n);
  auto y = read_array<float>(in, n);
  EdgeStore edges;
  edges.with_distances = with_d;
  edges.from = read_array<std::uint32_t>(in, e);
  edges.to = read_array<std::uint32_t>(in, e);
  if (with_d) edges.distance = read_array<float>(in, e);
  return make_graph(std::move(x), std::move(y), std::move(edges));
}

Graph read_edgelist(std::istream& in) {
  std::string line;
  std::uint64_t n = 0;
  std::uint64_t e = 0;
  auto header = [&](const char* label) -> std::uint64_t {
    if (!std::getline(in, line)) throw IntegrityError("edge list missing header");
    std::istringstream fields(line);
    std::string hash;
    std::string word;
    std::string count;
    if (!(fields >> hash >> word >> count) || hash != "#" || word != label) {
      throw IntegrityError(std::string("edge list header '# ") + label + "' expected");
    }
    return parse_uint(count);
  };
  n = header("nodes");
  e = header("edges");
  if (n > kMaxNodes) throw IntegrityError("edge list node count too large");

  std::vector<float> x(n);
  std::vector<float> y(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    if (!std::getline(in, line)) throw IntegrityError("edge list truncated in node section");
    std::istringstream fields(line);
    std::string a;
    std::string b;
    if (!(fields >> a >> b)) throw IntegrityError("bad node line");
    x[k] = parse_float(a);
    y[k] = parse_float(b);
  }
  EdgeStore edges;
  for (std::uint64_t k = 0; k < e; ++k) {
    if (!std::getline(in, line)) throw IntegrityError("edge list truncated in edge section");
    std::istringstream fields(line);
    std::string a;
    std::string b;
    std::string d;
    if (!(fields >> a >> b)) throw IntegrityError("bad edge line");
    const bool has_d = static_cast<bool>(fields >> d);
    if (k == 0) edges.with_distances = has_d;
    if (has_d != edges.with_distances) throw IntegrityError("edge lines disagree on distances");
    edges.push(static_cast<std::uint32_t>(parse_uint(a)), static_cast<std::uint32_t>(parse_uint(b)),
               has_d ? parse_float(d) : 0.0F);
  }
  return make_graph(std::move(x), std::move(y), std::move(edges));
}

Graph read_graphml(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::map<std::string, std::uint32_t> ids;
  std::vector<float> x;
  std::vector<float> y;
  EdgeStore edges;
  std::map<std::string, std::string> key_names;  // key id -> attr.name

  enum class Scope { none, node, edge } scope = Scope::none;
  std::string data_key;
  auto node_id = [&](const std::string& id) -> std::uint32_t {
    const auto it = ids.find(id);
    if (it == ids.end()) throw IntegrityError("edge references unknown node '" + id + "'");
    return it->second;
  };

  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const auto end = text.find('>', pos);
    if (end == std::string::npos) throw IntegrityError("unterminated GraphML tag");
    std::string_view tag(text.data() + pos + 1, end - pos - 1);
    const bool closing = !tag.empty() && tag.front() == '/';
    const bool self_closing = !tag.empty() && tag.back() == '/';
    if (self_closing) tag.remove_suffix(1);
    if (closing) tag.remove_prefix(1);
    const std::string_view name = tag.substr(0, tag.find_first_of(" \t\r\n"));

    if (!closing && (name.starts_with("?") || name.starts_with("!"))) {
      pos = end + 1;
      continue;
    }
    if (closing) {
      if (name == "node" || name == "edge") scope = Scope::none;
    } else if (name == "key") {
      auto attrs = attributes(tag);
      key_names[attrs["id"]] = attrs.count("attr.name") ? attrs["attr.name"] : attrs["id"];
    } else if (name == "node") {
      auto attrs = attributes(tag);
      const auto index = static_cast<std::uint32_t>(x.size());
      if (!ids.emplace(attrs["id"], index).second) throw IntegrityError("duplicate node id " + attrs["id"]);
      x.push_back(0.0F);
      y.push_back(0.0F);
      scope = self_closing ? Scope::none : Scope::node;
    } else if (name == "edge") {
      auto attrs = attributes(tag);
      edges.from.push_back(node_id(attrs["source"]));
      edges.to.push_back(node_id(attrs["target"]));
      scope = self_closing ? Scope::none : Scope::edge;
    } else if (name == "data" && !self_closing) {
      auto attrs = attributes(tag);
      const std::string key = key_names.count(attrs["key"]) ? key_names[attrs["key"]] : attrs["key"];
      const auto close = text.find("</data>", end);
      if (close == std::string::npos) throw IntegrityError("unterminated data element");
      const std::string_view value(text.data() + end + 1, close - end - 1);
      if (scope == Scope::node && key == "x") x.back() = parse_float(value);
      if (scope == Scope::node && key == "y") y.back() = parse_float(value);
      if (scope == Scope::edge && key == "d") {
        edges.with_distances = true;
        edges.distance.resize(edges.from.size(), 0.0F);
        edges.distance.back() = parse_float(value);
      }
      pos = close + 7;
      continue;
    }
    pos = end + 1;
  }
  if (edges.with_distances && edges.distance.size() != edges.from.size()) {
    throw IntegrityError("some GraphML edges lack a distance");
  }
  return make_graph(std::move(x), std::move(y), std::move(edges));
}

void write_stats_text(std::ostream& out, const GenStats& stats, const GraphStats* summary) {
  out << "algorithm: " << to_string(stats.algorithm) << '\n'
      << "nodes: " << stats.nodes << '\n'
      << "edges: " << stats.edges << '\n'
      << "mean_degree: " << (stats.nodes ? 2.0 * static_cast<double>(stats.edges) / stats.nodes : 0.0) << '\n'
      << "hits: " << stats.hits << '\n'
      << "edge_rejections: " << stats.edge_rejections << '\n'
      << "node_rejections: " << stats.node_rejections << '\n'
      << "bucket_pairs: " << stats.tasks << '\n'
      << "bucket_pairs_skipped: " << stats.skipped_tasks << '\n'
      << "sink_growths: " << stats.growth_events << '\n'
      << "node_seconds: " << stats.node_seconds << '\n'
      << "edge_seconds: " << stats.edge_seconds << '\n'
      << "node_bytes: " << stats.memory.node_bytes << '\n'
      << "edge_bytes: " << stats.memory.edge_bytes << '\n'
      << "overhead_bytes: " << stats.memory.overhead_bytes << '\n';
  if (summary != nullptr) {
    out << "degree_histogram:";
    for (const auto c : summary->degree_histogram) out << ' ' << c;
    out << "\nlength_histogram_max: " << summary->lengths.max_length() << "\nlength_histogram:";
    for (const auto c : summary->lengths.counts()) out << ' ' << c;
    out << '\n';
  }
  for (const auto& w : stats.warnings) out << "warning: " << w << '\n';
}

std::string stats_json(const GenStats& stats, const GraphStats* summary) {
  nlohmann::json j;
  j["algorithm"] = to_string(stats.algorithm);
  j["nodes"] = stats.nodes;
  j["edges"] = stats.edges;
  j["mean_degree"] = stats.nodes ? 2.0 * static_cast<double>(stats.edges) / static_cast<double>(stats.nodes) : 0.0;
  j["hits"] = stats.hits;
  j["edge_rejections"] = stats.edge_rejections;
  j["node_rejections"] = stats.node_rejections;
  j["bucket_pairs"] = stats.tasks;
  j["bucket_pairs_skipped"] = stats.skipped_tasks;
  j["sink_growths"] = stats.growth_events;
  j["node_seconds"] = stats.node_seconds;
  j["edge_seconds"] = stats.edge_seconds;
  j["memory"] = {{"node_bytes", stats.memory.node_bytes},
                 {"edge_bytes", stats.memory.edge_bytes},
                 {"overhead_bytes", stats.memory.overhead_bytes},
                 {"peak_edge_bytes", stats.memory.peak_edge_bytes}};
  j["warnings"] = stats.warnings;
  if (summary != nullptr) {
    j["degree_histogram"] = summary->degree_histogram;
    j["length_histogram"] = {{"max", summary->lengths.max_length()}, {"counts", summary->lengths.counts()}};
  }
  return j.dump(2);
}

}  // namespace sern
