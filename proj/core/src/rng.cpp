#include "granusense/rng.hpp"

#include <cmath>

#include "granusense/errors.hpp"

namespace granusense {
namespace {

// splitmix64: full-period 64-bit mixer, one multiply-xor cascade per step.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
  if (has_cached_gauss_) {
    has_cached_gauss_ = false;
    return cached_gauss_;
  }
  // Box-Muller on (0,1] x [0,1) to keep log() finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  cached_gauss_ = r * std::sin(a);
  has_cached_gauss_ = true;
  return r * std::cos(a);
}

double Rng::gaussian(double mean, double sigma) {
  return mean + sigma * gaussian();
}

int Rng::poisson(double lambda) {
  if (lambda < 0.0) throw DomainError("poisson rate must be non-negative");
  if (lambda == 0.0) return 0;
  // Count exponential inter-arrivals until their sum exceeds lambda.
  double acc = 0.0;
  int k = -1;
  do {
    acc += -std::log(1.0 - uniform());
    ++k;
  } while (acc < lambda);
  return k;
}

Rng Rng::derive(std::uint64_t stream) const { return Rng(mix(seed_, stream)); }

Rng Rng::derive(std::string_view stream) const {
  return derive(stream_hash(stream));
}

std::uint64_t stream_hash(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  // Two mixer rounds over the xor of one pre-mixed operand; cheap and
  // avalanching, so (a, b) and (a, b+1) land far apart.
  std::uint64_t x = b;
  std::uint64_t h = a ^ splitmix64(x);
  return splitmix64(h);
}

}  // namespace granusense
