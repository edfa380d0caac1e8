#pragma once

#include <cstdint>
#include <random>

namespace panelcluster {

/// Deterministic random stream. Normal deviates use explicit Box-Muller on
/// 53-bit uniforms so a seed fully determines the sequence independent of
/// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Stream for replication `stream` of a master seed; streams are
  /// independent and stable across worker counts.
  static Rng child(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t bits() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1], never zero (safe under log).
  double uniform_positive();

  double normal();

  /// Fair draw from {-1, +1}.
  int sign();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer, used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` of `master_seed`; Rng::child(m, s) is
/// Rng(derive_seed(m, s)).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

}  // namespace panelcluster
