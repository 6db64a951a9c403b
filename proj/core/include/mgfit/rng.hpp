#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace mgfit {

// All randomness in the project flows through this header. The generators
// are fully specified here (no std distributions), so runs are bit-identical
// across platforms and, with the stream-derivation scheme below, independent
// of worker count.

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

// Compile-time FNV-1a, used to turn stream labels into derivation ids.
constexpr std::uint64_t tag(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ULL;
  return h;
}

inline std::uint64_t tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return h;
}

// Stream splitting contract: an independent stream seed is derived from the
// master seed and a path of identifiers (labels, generation numbers, child
// or day indices) by chaining s = mix64(s ^ mix64(id)). Every parallel unit
// of work draws from its own derived stream, which makes results independent
// of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master ^ 0x6d676669745f7631ULL);
  for (std::uint64_t id : path) s = mix64(s ^ mix64(id));
  return s;
}

// xoshiro256** seeded via splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform in [0, n); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = -n % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Fair coin in {+1, -1}.
  std::int8_t sign() { return (next() >> 63) ? std::int8_t{1} : std::int8_t{-1}; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace mgfit
