#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boolbias/boolfunc.hpp"

namespace boolbias {

using KValue = double;

enum class ComplexityMeasure { kLZ, kEntropy, kBooleanNF };

inline const char* measure_name(ComplexityMeasure m) {
  switch (m) {
    case ComplexityMeasure::kLZ: return "lz";
    case ComplexityMeasure::kEntropy: return "entropy";
    case ComplexityMeasure::kBooleanNF: return "boolean_nf";
  }
  return "?";
}

/// Number of words in the Lempel-Ziv-76 exhaustive parsing of a binary
/// string. Each new word is the shortest prefix of the remainder that cannot
/// be reproduced by copying from earlier history (self-overlap allowed); a
/// final reproducible stretch still counts as one word. Scan after
/// Kaspar & Schuster; the naive reference parser in the test suite is the
/// behavioural contract.
inline int lz76_word_count(std::span<const std::uint8_t> s) {
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("empty string has no LZ parsing");
  if (n == 1) return 1;
  int words = 1;
  std::size_t l = 1, i = 0, k = 1, kmax = 1;
  for (;;) {
    if (s[i + k - 1] == s[l + k - 1]) {
      ++k;
      if (l + k > n) {  // matched through the end: one final word
        ++words;
        break;
      }
    } else {
      if (k > kmax) kmax = k;
      ++i;
      if (i == l) {  // no earlier start reproduces a longer prefix
        ++words;
        l += kmax;
        if (l + 1 > n) break;
        i = 0;
        k = 1;
        kmax = 1;
      } else {
        k = 1;
      }
    }
  }
  return words;
}

namespace detail {

inline bool span_is_constant(std::span<const std::uint8_t> s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] != s[0]) return false;
  return true;
}

inline std::vector<std::uint8_t> reversed(std::span<const std::uint8_t> s) {
  return {s.rbegin(), s.rend()};
}

}  // namespace detail

/// LZ complexity estimate: log2(L) for the constant strings, otherwise
/// log2(L) times the mean of the forward and reversed word counts. On
/// length-2^n strings every value is a multiple of log2(L)/2.
inline KValue lz_complexity(std::span<const std::uint8_t> s) {
  if (s.empty()) throw std::invalid_argument("empty string has no complexity");
  const double log2l = std::log2(static_cast<double>(s.size()));
  if (detail::span_is_constant(s)) return log2l;
  const auto rev = detail::reversed(s);
  return log2l * (lz76_word_count(s) + lz76_word_count(rev)) / 2.0;
}

/// String entropy L*H(p) with p the fraction of ones; 0 for constant strings.
inline KValue entropy_complexity(std::span<const std::uint8_t> s) {
  if (s.empty()) throw std::invalid_argument("empty string has no complexity");
  std::size_t ones = 0;
  for (auto b : s) ones += b;
  if (ones == 0 || ones == s.size()) return 0.0;
  const double p = static_cast<double>(ones) / static_cast<double>(s.size());
  const double h = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  return static_cast<double>(s.size()) * h;
}

inline int lz76_word_count(const BoolFn& f) {
  const auto bytes = f.to_bytes();
  return lz76_word_count(std::span<const std::uint8_t>(bytes));
}

inline KValue lz_complexity(const BoolFn& f) {
  const auto bytes = f.to_bytes();
  return lz_complexity(std::span<const std::uint8_t>(bytes));
}

inline KValue entropy_complexity(const BoolFn& f) {
  const auto bytes = f.to_bytes();
  return entropy_complexity(std::span<const std::uint8_t>(bytes));
}

/// Half the bin spacing of the LZ grid for length-L strings: values are
/// log2(L), or log2(L)/2 times an integer.
inline double lz_bin_width(int n) { return static_cast<double>(n) / 2.0; }

/// Probability mass over complexity values. Census marginals and posteriors
/// sum to 1; reference curves (ideal compressor) may not.
struct ComplexityDist {
  std::map<KValue, double> mass;
  ComplexityMeasure measure = ComplexityMeasure::kLZ;
  bool extrapolated = false;

  double total() const {
    double t = 0.0;
    for (const auto& [k, p] : mass) t += p;
    return t;
  }
};

/// Reference distribution of an ideal compressor over complexities 0..k_max:
/// P(K) = 2^(K - k_max - 1). Mass sums to 1 - 2^(-k_max-1).
inline ComplexityDist ideal_compressor_pk(int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
  ComplexityDist d;
  for (int k = 0; k <= k_max; ++k)
    d.mass[static_cast<double>(k)] = std::ldexp(1.0, k - k_max - 1);
  return d;
}

/// Total variation distance between two distributions on the same K grid.
inline double tv_distance(const std::map<KValue, double>& a,
                          const std::map<KValue, double>& b) {
  double tv = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      tv += std::abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      tv += std::abs(ib->second);
      ++ib;
    } else {
      tv += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return tv / 2.0;
}

inline double tv_distance(const ComplexityDist& a, const ComplexityDist& b) {
  return tv_distance(a.mass, b.mass);
}

}  // namespace boolbias
