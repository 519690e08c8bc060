#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace boolbias {

/// splitmix64 step (Vigna, public domain). Used only to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives the seed for an independent stream. `purpose` separates the
/// different uses of one base seed inside an experiment (init vs. split vs.
/// batch order), `index` enumerates replicas/samples within a use.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t purpose,
                                 std::uint64_t index) {
  std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (purpose + 1));
  std::uint64_t a = splitmix64(s);
  s = a ^ (0xbf58476d1ce4e5b9ULL * (index + 1));
  return splitmix64(s);
}

/// xoshiro256++ (Blackman & Vigna, public domain) with a Gaussian tap.
///
/// Every random draw in the library flows through this generator so results
/// are reproducible across platforms and independent of the standard
/// library's distribution implementations. Per-sample generators are built
/// with Rng(seed, index): the stream depends only on (seed, index), never on
/// which worker processes the sample.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  Rng(std::uint64_t base_seed, std::uint64_t index)
      : Rng(stream_seed(base_seed, 0, index)) {}

  Rng(std::uint64_t base_seed, std::uint64_t purpose, std::uint64_t index)
      : Rng(stream_seed(base_seed, purpose, index)) {}

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ULL; }

  /// Uniform double in [0,1) with 53 random bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool next_bit() { return (next_u64() >> 63) != 0; }

  /// Standard normal via Marsaglia's polar method (second value cached).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double g = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * g;
    have_spare_ = true;
    return u * g;
  }

  /// In-place Fisher-Yates shuffle (std::shuffle is not portable bit-for-bit).
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace boolbias
