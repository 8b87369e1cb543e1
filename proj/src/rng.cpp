#include "sern/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sern/errors.hpp"

namespace sern {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
  const std::uint64_t tag = (static_cast<std::uint64_t>(stream) << 32) + index;
  return mix64(master ^ mix64(tag));
}

void Mwc::reseed(std::uint64_t seed) {
  const std::uint64_t z = mix64(seed);
  // Carry must stay below A - 1 and (0, 0) is absorbing; both fixed points
  // of the recurrence are excluded here.
  std::uint64_t carry = (z >> 32) % (kMultiplier - 1);
  std::uint64_t value = z & 0xffffffffULL;
  if (carry == 0 && value == 0) value = 1;
  state_ = (carry << 32) | value;
  for (int i = 0; i < 8; ++i) next_u32();
  draws_ = 0;
}

GeometricSkip::GeometricSkip(double p) : p_(p) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw ParameterError("geometric skip probability must lie in (0, 1], got " + std::to_string(p));
  }
  if (p == 1.0) {
    certain_ = true;
  } else {
    inv_log_fail_ = 1.0 / std::log1p(-p);
  }
}

std::uint64_t geometric_skip(Mwc& rng, double p) {
  const double k = GeometricSkip(p).draw(rng);
  constexpr double kMax = 18446744073709549568.0;  // largest double below 2^64
  return k >= kMax ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(k);
}

double normal(Mwc& rng) {
  for (;;) {
    const double u = 2.0 * rng.next_double() - 1.0;
    const double v = 2.0 * rng.next_double() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double gamma_variate(Mwc& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_variate(Mwc& rng, double a, double b) {
  const double x = gamma_variate(rng, a);
  const double y = gamma_variate(rng, b);
  return x / (x + y);
}

namespace {

// Successes among n Bernoulli(p) trials, walking the hits with geometric
// skips. Cost is O(n p + 1); callers keep p <= 1/2.
std::uint64_t count_by_skips(Mwc& rng, std::uint64_t n, double p) {
  const GeometricSkip skip(p);
  std::uint64_t hits = 0;
  std::uint64_t next = 0;
  for (;;) {
    const double k = skip.draw(rng);
    if (k >= static_cast<double>(n - next)) break;
    next += static_cast<std::uint64_t>(k);
    if (next >= n) break;
    ++hits;
    ++next;
  }
  return hits;
}

constexpr std::uint64_t kSplitThreshold = 64;

}  // namespace

std::uint64_t binomial(Mwc& rng, std::uint64_t n, double p) {
  if (n == 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return n;

  std::uint64_t base = 0;
  // Knuth, TAOCP vol. 2, 3.4.1: the a-th smallest of n uniforms is
  // Beta(a, n + 1 - a); split the trials on which side of it p falls.
  while (n > kSplitThreshold) {
    const std::uint64_t a = 1 + n / 2;
    const std::uint64_t b = n + 1 - a;
    const double x = beta_variate(rng, static_cast<double>(a), static_cast<double>(b));
    if (x >= p) {
      n = a - 1;
      p = p / x;
    } else {
      base += a;
      n = b - 1;
      p = (p - x) / (1.0 - x);
    }
    if (!(p > 0.0)) return base;
    if (p >= 1.0) return base + n;
  }
  if (p > 0.5) return base + n - count_by_skips(rng, n, 1.0 - p);
  return base + count_by_skips(rng, n, p);
}

std::vector<std::uint64_t> multinomial(Mwc& rng, std::uint64_t n, std::span<const double> probs) {
  double total = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0)) throw ParameterError("multinomial probabilities must be non-negative");
    total += p;
  }
  if (probs.empty() || std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("multinomial probabilities must sum to 1, got " + std::to_string(total));
  }

  std::vector<std::uint64_t> counts(probs.size(), 0);
  // Suffix sums keep the conditional probabilities free of cancellation.
  std::vector<double> tail(probs.size() + 1, 0.0);
  for (std::size_t k = probs.size(); k-- > 0;) tail[k] = tail[k + 1] + probs[k];
  std::size_t last = probs.size();
  while (last > 0 && probs[last - 1] == 0.0) --last;

  std::uint64_t remaining = n;
  for (std::size_t k = 0; k < last && remaining > 0; ++k) {
    if (probs[k] == 0.0) continue;
    if (k + 1 == last) {
      counts[k] = remaining;
      break;
    }
    const double conditional = std::min(1.0, probs[k] / tail[k]);
    counts[k] = binomial(rng, remaining, conditional);
    remaining -= counts[k];
  }
  return counts;
}

}  // namespace sern
