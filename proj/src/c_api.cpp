#include "sern/sern.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "sern/config.hpp"
#include "sern/engine.hpp"
#include "sern/errors.hpp"

namespace {

thread_local std::string last_error;

void* default_alloc(size_t bytes, void*) { return std::malloc(bytes); }

template <class T>
T* export_array(const std::vector<T>& values, const sern_allocator& allocator) {
  if (values.empty()) return nullptr;
  const std::size_t bytes = values.size() * sizeof(T);
  auto* block = static_cast<T*>(allocator.alloc(bytes, allocator.context));
  if (block == nullptr) throw sern::ResourceError("host allocator returned null");
  std::memcpy(block, values.data(), bytes);
  return block;
}

sern::GenConfig to_config(const sern_config& c) {
  sern::GenConfig config;
  config.n = c.nodes;
  config.model.kind = sern::parse_deterrence(c.model != nullptr ? c.model : "waxman");
  config.model.params = {c.q, c.s, c.r, c.theta1, c.theta2};
  config.metric = sern::parse_metric(c.metric != nullptr ? c.metric : "l2");
  config.region = sern::parse_region(c.region != nullptr ? c.region : "rect:1,1");
  config.grid_size = c.buckets == 0 ? sern::kDefaultGridSize : c.buckets;
  config.algorithm = sern::parse_algorithm(c.algorithm != nullptr ? c.algorithm : "bucket");
  config.workers = c.threads == 0 ? 1 : c.threads;
  config.buffer = c.buffer == 0 ? sern::kDefaultBuffer : c.buffer;
  config.seed = c.seed;
  config.with_distances = c.distances != 0;
  return config;
}

}  // namespace

extern "C" {

void sern_default_config(sern_config* config) {
  if (config == nullptr) return;
  *config = sern_config{};
  config->q = 1.0;
  config->buckets = sern::kDefaultGridSize;
  config->threads = 1;
  config->buffer = sern::kDefaultBuffer;
}

int sern_generate(const sern_config* config, const sern_allocator* allocator, sern_result* result) {
  if (result == nullptr) return SERN_PARAMETER_ERROR;
  *result = sern_result{};
  if (config == nullptr) {
    last_error = "config is null";
    return SERN_PARAMETER_ERROR;
  }
  const sern_allocator hooks =
      allocator != nullptr && allocator->alloc != nullptr ? *allocator : sern_allocator{default_alloc, nullptr, nullptr};
  sern_result out{};
  try {
    const sern::GenResult graph = sern::generate(to_config(*config));
    out.nodes = graph.nodes.size();
    out.edges = graph.edges.size();
    out.x = export_array(graph.nodes.x, hooks);
    out.y = export_array(graph.nodes.y, hooks);
    out.from = export_array(graph.edges.from, hooks);
    out.to = export_array(graph.edges.to, hooks);
    if (graph.edges.with_distances) out.distance = export_array(graph.edges.distance, hooks);
    out.hits = graph.stats.hits;
    out.node_seconds = graph.stats.node_seconds;
    out.edge_seconds = graph.stats.edge_seconds;
    *result = out;
    return SERN_OK;
  } catch (const sern::ParameterError& e) {
    last_error = e.what();
    return SERN_PARAMETER_ERROR;
  } catch (const sern::ResourceError& e) {
    last_error = e.what();
    // Arrays from a host allocator belong to the host; ours are freed here.
    if (hooks.alloc == default_alloc) sern_free_result(&out);
    return SERN_RESOURCE_ERROR;
  } catch (const sern::IoError& e) {
    last_error = e.what();
    return SERN_IO_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SERN_INTERNAL_ERROR;
  }
}

const char* sern_last_error(void) { return last_error.c_str(); }

void sern_free_result(sern_result* result) {
  if (result == nullptr) return;
  std::free(result->x);
  std::free(result->y);
  std::free(result->from);
  std::free(result->to);
  std::free(result->distance);
  *result = sern_result{};
}

}  // extern "C"
