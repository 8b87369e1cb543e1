/* C interface for foreign-function bindings.
 *
 * The host passes allocation callbacks; every array in sern_result is
 * obtained through them, so the host's garbage collector owns the memory.
 * Without callbacks malloc is used and sern_free_result releases it.
 */
#ifndef SERN_SERN_H
#define SERN_SERN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef void* (*sern_alloc_fn)(size_t bytes, void* context);
typedef void* (*sern_realloc_fn)(void* block, size_t bytes, void* context);

typedef struct sern_allocator {
  sern_alloc_fn alloc;
  sern_realloc_fn realloc; /* may be NULL */
  void* context;
} sern_allocator;

typedef struct sern_config {
  uint64_t nodes;
  const char* model;     /* waxman, ger, threshold, ... (NULL = waxman) */
  double q, s, r, theta1, theta2;
  const char* metric;    /* l2, l1, l0, linf (NULL = l2) */
  const char* region;    /* rect:W,H | ellipse:A,B | polygon:PATH (NULL = rect:1,1) */
  uint32_t buckets;      /* 0 = default 20 */
  const char* algorithm; /* naive, qjump, bucket (NULL = bucket) */
  uint32_t threads;      /* 0 = 1 */
  uint64_t buffer;       /* 0 = default 16384 */
  uint64_t seed;
  int distances;
} sern_config;

typedef struct sern_result {
  uint64_t nodes;
  uint64_t edges;
  float* x;
  float* y;
  uint32_t* from;
  uint32_t* to;
  float* distance; /* NULL unless distances were requested */
  uint64_t hits;
  double node_seconds;
  double edge_seconds;
} sern_result;

enum {
  SERN_OK = 0,
  SERN_PARAMETER_ERROR = 2,
  SERN_RESOURCE_ERROR = 3,
  SERN_IO_ERROR = 4,
  SERN_INTERNAL_ERROR = 5
};

/* Fill a config with the CLI defaults. */
void sern_default_config(sern_config* config);

/* Generate one graph. Returns SERN_OK or an error code; on error the result
 * is zeroed and sern_last_error() describes the failure. */
int sern_generate(const sern_config* config, const sern_allocator* allocator, sern_result* result);

/* Message for the most recent failure on this thread. */
const char* sern_last_error(void);

/* Release arrays from a call made without an allocator. */
void sern_free_result(sern_result* result);

#ifdef __cplusplus
}
#endif

#endif /* SERN_SERN_H */
