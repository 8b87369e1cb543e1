#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace sern {

/// Marsaglia multiply-with-carry generator, base 2^32, lag 1.
///
/// The 64-bit state word holds the current value in its low half and the
/// carry in its high half; one step is `state = A * low + high` with
/// A = 4294957665. Since A * 2^32 - 1 is a safe prime the sequence has period
/// (A * 2^32 - 2) / 2, about 2^63. Each step yields the low 32 bits.
///
/// Everything is inline so the per-node and per-hit draws in the hot loops
/// compile down to a multiply and an add.
class Mwc {
 public:
  static constexpr std::uint64_t kMultiplier = 4294957665ULL;

  explicit Mwc(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed);

  std::uint32_t next_u32() {
    state_ = kMultiplier * (state_ & 0xffffffffULL) + (state_ >> 32);
    ++draws_;
    return static_cast<std::uint32_t>(state_);
  }

  /// Uniform on [0, 1) with 32 bits of resolution.
  double next_uniform() { return next_u32() * 0x1p-32; }

  /// Uniform on (0, 1]. Used for acceptance tests `u <= p`, so p = 0 never
  /// accepts and p = 1 always does.
  double next_uniform_pos() { return (static_cast<double>(next_u32()) + 1.0) * 0x1p-32; }

  /// Uniform on [0, 1) with 53 bits (two draws).
  double next_double() {
    const std::uint64_t hi = next_u32() >> 5;
    const std::uint64_t lo = next_u32() >> 6;
    return static_cast<double>((hi << 26) | lo) * 0x1p-53;
  }

  /// Number of 32-bit outputs consumed since construction or reseed.
  std::uint64_t draws() const { return draws_; }
  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t draws_ = 0;
};

/// SplitMix64 finalizer; used for seeding only.
std::uint64_t mix64(std::uint64_t x);

/// Independent streams derived from one master seed.
enum class Stream : std::uint64_t { counts = 1, nodes = 2, edges = 3, analysis = 4 };

/// Seed for worker `index` of `stream`: mix64(master ^ mix64(stream * 2^32 + index)).
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index);

/// Geometric skips with a fixed success probability: K = failures before the
/// first success, P(K = k) = (1-p)^k p. The logarithm of the failure
/// probability is computed once at construction.
class GeometricSkip {
 public:
  explicit GeometricSkip(double p);

  double probability() const { return p_; }

  /// Skip length as a real (possibly larger than any integer type). p = 1
  /// returns 0 without touching the generator.
  double draw(Mwc& rng) const {
    if (certain_) return 0.0;
    return std::floor(std::log(rng.next_uniform_pos()) * inv_log_fail_);
  }

 private:
  double p_;
  double inv_log_fail_ = 0.0;
  bool certain_ = false;
};

/// One geometric variate, saturated to the range of uint64.
std::uint64_t geometric_skip(Mwc& rng, double p);

/// Exact Binomial(n, p) variate. Large n is reduced with Knuth's beta
/// splitting, the remainder is counted with geometric waiting times.
std::uint64_t binomial(Mwc& rng, std::uint64_t n, double p);

/// Multinomial(n, probs) as a chain of conditional binomials in index order.
/// Throws ParameterError unless probs are non-negative and sum to 1 (1e-9).
std::vector<std::uint64_t> multinomial(Mwc& rng, std::uint64_t n, std::span<const double> probs);

/// Standard normal (Marsaglia polar method).
double normal(Mwc& rng);

/// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang).
double gamma_variate(Mwc& rng, double shape);

/// Beta(a, b) for a, b >= 1.
double beta_variate(Mwc& rng, double a, double b);

}  // namespace sern
