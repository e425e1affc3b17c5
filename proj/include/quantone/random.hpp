#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace quantone {

/// Derives an independent 64-bit seed from a parent seed and a stream id
/// (splitmix64 finalizer). Used to split per-task random streams.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// Seeded random stream. Wraps mt19937_64 and performs its own
/// integer/real conversions so sequences are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer on [0, n); n must be positive.
  std::size_t below(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Child stream keyed by `stream`; does not advance this stream.
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace quantone
