#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boolbias/rng.hpp"

namespace boolbias {

/// A Boolean function on n inputs, stored as the 2^n-bit string of its
/// outputs. Bit i is the output on the input whose ascending-binary value is
/// i, so bit 0 belongs to input 00...0. Supported arities are 2..10; the bits
/// live in a fixed 1024-bit buffer so values can be copied and hashed freely.
class BoolFn {
 public:
  static constexpr int kMinArity = 2;
  static constexpr int kMaxArity = 10;

  BoolFn() : n_(kMinArity) {}

  explicit BoolFn(int n) : n_(checked_arity(n)) {}

  int arity() const { return n_; }
  int size() const { return 1 << n_; }

  bool get(int i) const {
    return (words_[static_cast<unsigned>(i) >> 6] >> (i & 63)) & 1ULL;
  }

  void set(int i, bool v) {
    const std::uint64_t mask = 1ULL << (i & 63);
    if (v)
      words_[static_cast<unsigned>(i) >> 6] |= mask;
    else
      words_[static_cast<unsigned>(i) >> 6] &= ~mask;
  }

  int word_count() const { return (size() + 63) / 64; }
  std::uint64_t word(int w) const { return words_[w]; }
  void set_word(int w, std::uint64_t v) { words_[w] = v; trim(); }

  int popcount() const {
    int c = 0;
    for (int w = 0; w < word_count(); ++w) c += std::popcount(words_[w]);
    return c;
  }

  bool is_constant() const {
    const int p = popcount();
    return p == 0 || p == size();
  }

  BoolFn complement() const {
    BoolFn r(n_);
    for (int w = 0; w < word_count(); ++w) r.words_[w] = ~words_[w];
    r.trim();
    return r;
  }

  friend bool operator==(const BoolFn& a, const BoolFn& b) {
    if (a.n_ != b.n_) return false;
    for (int w = 0; w < a.word_count(); ++w)
      if (a.words_[w] != b.words_[w]) return false;
    return true;
  }

  friend bool operator!=(const BoolFn& a, const BoolFn& b) {
    return !(a == b);
  }

  /// Lexicographic on (n, bits); gives census output a canonical order.
  friend bool operator<(const BoolFn& a, const BoolFn& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    for (int w = a.word_count() - 1; w >= 0; --w)
      if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
    return false;
  }

  std::size_t hash() const {
    std::uint64_t h = 0x100000001b3ULL * static_cast<std::uint64_t>(n_);
    for (int w = 0; w < word_count(); ++w) {
      std::uint64_t s = h ^ words_[w];
      h = splitmix64(s);
    }
    return static_cast<std::size_t>(h);
  }

  /// "01..." rendering, bit 0 first.
  std::string to_string() const {
    std::string s(static_cast<std::size_t>(size()), '0');
    for (int i = 0; i < size(); ++i)
      if (get(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  static BoolFn from_string(int n, std::string_view bits) {
    BoolFn f(n);
    if (static_cast<int>(bits.size()) != f.size())
      throw std::invalid_argument("bit string has wrong length");
    for (int i = 0; i < f.size(); ++i) {
      const char c = bits[static_cast<std::size_t>(i)];
      if (c != '0' && c != '1')
        throw std::invalid_argument("bit string must be over {0,1}");
      f.set(i, c == '1');
    }
    return f;
  }

  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(size()));
    for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = get(i);
    return out;
  }

 private:
  static int checked_arity(int n) {
    if (n < kMinArity || n > kMaxArity)
      throw std::invalid_argument("arity must be in [2,10]");
    return n;
  }

  void trim() {
    const int used = word_count();
    for (int w = used; w < 16; ++w) words_[w] = 0;
    const int tail = size() & 63;
    if (tail) words_[used - 1] &= (1ULL << tail) - 1;
  }

  int n_;
  std::array<std::uint64_t, 16> words_{};
};

struct BoolFnHash {
  std::size_t operator()(const BoolFn& f) const { return f.hash(); }
};

inline int hamming(const BoolFn& a, const BoolFn& b) {
  if (a.arity() != b.arity())
    throw std::invalid_argument("arity mismatch");
  int d = 0;
  for (int w = 0; w < a.word_count(); ++w)
    d += std::popcount(a.word(w) ^ b.word(w));
  return d;
}

/// Fraction of incorrect labels in [0,1]. The denominator is 2^n for the
/// full-set error and |test| for the generalization error.
struct FnError {
  double value = 0.0;
};

inline FnError full_error(const BoolFn& f, const BoolFn& g) {
  return {static_cast<double>(hamming(f, g)) / f.size()};
}

/// m training input indices plus the complementary test indices. Both sides
/// are kept sorted; together they partition {0, ..., 2^n - 1}.
struct TrainSplit {
  int m = 0;
  std::vector<int> train_idx;
  std::vector<int> test_idx;
};

inline TrainSplit split(int n, int m, Rng& rng) {
  const int total = 1 << n;
  if (m < 1 || m > total)
    throw std::invalid_argument("training-set size out of range");
  std::vector<int> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first m entries are a uniform m-subset.
  for (int i = 0; i < m; ++i) {
    const int j =
        i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  TrainSplit s;
  s.m = m;
  s.train_idx.assign(idx.begin(), idx.begin() + m);
  s.test_idx.assign(idx.begin() + m, idx.end());
  std::sort(s.train_idx.begin(), s.train_idx.end());
  std::sort(s.test_idx.begin(), s.test_idx.end());
  return s;
}

inline TrainSplit split(const BoolFn& f, int m, Rng& rng) {
  return split(f.arity(), m, rng);
}

inline int restricted_hamming(const BoolFn& a, const BoolFn& b,
                              const std::vector<int>& idx) {
  if (a.arity() != b.arity())
    throw std::invalid_argument("arity mismatch");
  int d = 0;
  for (int i : idx) d += a.get(i) != b.get(i);
  return d;
}

inline FnError train_error(const BoolFn& f, const BoolFn& target,
                           const TrainSplit& s) {
  return {static_cast<double>(restricted_hamming(f, target, s.train_idx)) /
          static_cast<double>(s.m)};
}

inline FnError gen_error(const BoolFn& f, const BoolFn& target,
                         const TrainSplit& s) {
  if (s.test_idx.empty()) return {0.0};
  return {static_cast<double>(restricted_hamming(f, target, s.test_idx)) /
          static_cast<double>(s.test_idx.size())};
}

// --- hex wire format -------------------------------------------------------
//
// One hex digit per 4 bits, big-endian over the bit order: the leftmost digit
// holds bits 0-3 with bit 0 as the most significant bit of the digit.

inline std::string encode_hex(const BoolFn& f) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(static_cast<std::size_t>(f.size() / 4), '0');
  for (int d = 0; d < f.size() / 4; ++d) {
    int v = 0;
    for (int b = 0; b < 4; ++b) v = (v << 1) | (f.get(4 * d + b) ? 1 : 0);
    out[static_cast<std::size_t>(d)] = kDigits[v];
  }
  return out;
}

inline BoolFn decode_hex(int n, std::string_view hex) {
  BoolFn f(n);
  if (static_cast<int>(hex.size()) != f.size() / 4)
    throw std::invalid_argument("hex string has wrong length for arity");
  for (int d = 0; d < static_cast<int>(hex.size()); ++d) {
    const char c = hex[static_cast<std::size_t>(d)];
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      v = c - 'A' + 10;
    else
      throw std::invalid_argument("non-hex character in function encoding");
    for (int b = 0; b < 4; ++b) f.set(4 * d + b, (v >> (3 - b)) & 1);
  }
  return f;
}

/// Arity implied by the encoding length (4 bits per digit).
inline int arity_from_hex_length(std::size_t digits) {
  const std::size_t bits = digits * 4;
  if (bits < 4 || !std::has_single_bit(bits))
    throw std::invalid_argument("hex length must encode a power-of-two bit count");
  return std::countr_zero(bits);
}

// --- target construction ----------------------------------------------------

enum class TargetKind { kRepeatPattern, kParity, kRandom, kRandomBalanced };

inline BoolFn make_target(TargetKind kind, int n, std::string_view pattern,
                          Rng& rng) {
  BoolFn f(n);
  switch (kind) {
    case TargetKind::kRepeatPattern: {
      const int len = static_cast<int>(pattern.size());
      if (len == 0 || f.size() % len != 0)
        throw std::invalid_argument("pattern length must divide 2^n");
      for (int i = 0; i < f.size(); ++i) {
        const char c = pattern[static_cast<std::size_t>(i % len)];
        if (c != '0' && c != '1')
          throw std::invalid_argument("pattern must be over {0,1}");
        f.set(i, c == '1');
      }
      break;
    }
    case TargetKind::kParity:
      for (int i = 0; i < f.size(); ++i)
        f.set(i, std::popcount(static_cast<unsigned>(i)) & 1);
      break;
    case TargetKind::kRandom:
      for (int i = 0; i < f.size(); ++i) f.set(i, rng.next_bit());
      break;
    case TargetKind::kRandomBalanced: {
      std::vector<int> idx(static_cast<std::size_t>(f.size()));
      std::iota(idx.begin(), idx.end(), 0);
      rng.shuffle(idx);
      for (int i = 0; i < f.size() / 2; ++i)
        f.set(idx[static_cast<std::size_t>(i)], true);
      break;
    }
  }
  return f;
}

inline BoolFn random_function(int n, Rng& rng) {
  return make_target(TargetKind::kRandom, n, {}, rng);
}

}  // namespace boolbias
