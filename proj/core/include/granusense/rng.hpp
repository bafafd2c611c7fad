#pragma once

#include <cstdint>
#include <string_view>

namespace granusense {

// FNV-1a hash of a stream name; used to label derived seed streams.
std::uint64_t stream_hash(std::string_view name);

// Deterministic pseudo-random stream with a splittable seed space.
//
// Every stochastic quantity in the library is drawn from an Rng constructed
// from an explicit seed, so a (inputs, seed) pair maps to bit-identical
// outputs on a given build. Child streams derived via derive()/mix() are
// decorrelated from the parent and from each other, which lets one master
// seed fan out to per-record and per-stage seeds without shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; pairs are cached.
  double gaussian();
  double gaussian(double mean, double sigma);

  // Poisson draw by exponential inter-arrival summation; exact for the
  // moderate rates used here (lambda <= a few thousand).
  int poisson(double lambda);

  // Independent child stream; depends on this stream's seed, not its
  // current position, so derivation order never matters.
  Rng derive(std::uint64_t stream) const;
  Rng derive(std::string_view stream) const;

  std::uint64_t seed() const { return seed_; }

  // Stateless seed combiner used to build stream ids from indices.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

}  // namespace granusense
