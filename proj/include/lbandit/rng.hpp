#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace lbandit {

/// SplitMix64 finalizer; used for seeding and seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic child seed for a path such as (repeat, inner_run).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

/// Seeded xoshiro256** stream. Every sampler in the library draws from an
/// explicit stream; there is no global generator. Streams are cheap to copy,
/// and split() yields statistically independent children keyed by an integer.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal via the Marsaglia polar method.
  double normal();
  void fill_normal(std::span<double> out);
  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
  double gamma(double shape);
  /// Beta(a, b) as a ratio of gammas.
  double beta(double a, double b);
  bool bernoulli(double p);
  /// Index drawn with probability proportional to probs (assumed normalized).
  std::size_t categorical(std::span<const double> probs);

  RandomStream split(std::uint64_t key) const;

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lbandit
