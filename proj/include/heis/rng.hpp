#pragma once

// Counter-based splittable RNG. Every output is a hash of (key, counter), so
// a draw sequence is a pure function of (seed, stream id) and independent of
// what any other stream does. Children derived via stream() replay identically
// regardless of creation order, which is what makes parallel sweeps
// order-independent.

#include <cstdint>

namespace heis {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), key_(derive(mix64(seed ^ 0x6a09e667f3bcc909ULL), stream_id)) {}

  std::uint64_t next_u64() {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Child generator for sub-stream `id`, starting at counter 0. Independent
  // of this generator's current position.
  Rng stream(std::uint64_t id) const {
    Rng child(*this);
    child.key_ = derive(key_, id);
    child.counter_ = 0;
    return child;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t derive(std::uint64_t key, std::uint64_t id) {
    return mix64(key ^ mix64(id + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace heis
