#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "boolbias/boolfunc.hpp"
#include "boolbias/complexity.hpp"

namespace boolbias {
namespace qm {

/// Product term over n variables: `dash` marks eliminated variables, `value`
/// fixes the remaining ones. Literal count is n - popcount(dash).
struct Implicant {
  std::uint16_t value = 0;
  std::uint16_t dash = 0;

  friend bool operator==(const Implicant& a, const Implicant& b) {
    return a.value == b.value && a.dash == b.dash;
  }
  friend bool operator<(const Implicant& a, const Implicant& b) {
    return a.dash != b.dash ? a.dash < b.dash : a.value < b.value;
  }
};

inline bool covers(const Implicant& t, std::uint16_t minterm) {
  return ((minterm ^ t.value) & ~t.dash) == 0;
}

/// Quine-McCluskey prime implicants of the given on-set.
inline std::vector<Implicant> prime_implicants(int n,
                                               const std::vector<std::uint16_t>& on) {
  std::vector<Implicant> current;
  current.reserve(on.size());
  for (auto m : on) current.push_back({m, 0});
  std::sort(current.begin(), current.end());
  current.erase(std::unique(current.begin(), current.end()), current.end());

  std::vector<Implicant> primes;
  while (!current.empty()) {
    std::vector<bool> combined(current.size(), false);
    std::vector<Implicant> next;
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        if (current[i].dash != current[j].dash) continue;
        const std::uint16_t diff = current[i].value ^ current[j].value;
        if (std::popcount(diff) != 1) continue;
        next.push_back({static_cast<std::uint16_t>(current[i].value & ~diff),
                        static_cast<std::uint16_t>(current[i].dash | diff)});
        combined[i] = combined[j] = true;
      }
    }
    for (std::size_t i = 0; i < current.size(); ++i)
      if (!combined[i]) primes.push_back(current[i]);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    current = std::move(next);
    (void)n;
  }
  std::sort(primes.begin(), primes.end());
  return primes;
}

namespace detail {

struct CoverSearch {
  int n = 0;
  const std::vector<Implicant>* primes = nullptr;
  std::vector<std::vector<int>> minterm_to_primes;  // candidate primes per minterm
  std::vector<std::vector<std::uint16_t>> prime_covers;
  long best = -1;
  std::uint64_t nodes = 0;
  std::uint64_t node_budget = 0;
  bool exhausted = false;

  int literals(int p) const {
    return n - std::popcount((*primes)[static_cast<std::size_t>(p)].dash);
  }

  void search(std::vector<int>& cover_count, long lits,
              const std::vector<std::uint16_t>& uncovered_list) {
    if (++nodes > node_budget) {
      exhausted = true;
      return;
    }
    if (best >= 0 && lits >= best) return;
    // Pick the uncovered minterm with the fewest candidate primes.
    int pick = -1;
    std::size_t pick_options = ~std::size_t{0};
    for (auto m : uncovered_list) {
      if (cover_count[m] > 0) continue;
      const auto opts = minterm_to_primes[m].size();
      if (opts < pick_options) {
        pick_options = opts;
        pick = m;
      }
    }
    if (pick < 0) {  // everything covered
      best = lits;
      return;
    }
    for (int p : minterm_to_primes[static_cast<std::size_t>(pick)]) {
      for (auto m : prime_covers[static_cast<std::size_t>(p)]) ++cover_count[m];
      search(cover_count, lits + literals(p), uncovered_list);
      for (auto m : prime_covers[static_cast<std::size_t>(p)]) --cover_count[m];
      if (exhausted) return;
    }
  }
};

}  // namespace detail

/// Minimum total literal count of a sum-of-products cover of `on`, using the
/// prime implicants. Exact branch-and-bound up to a node budget, greedy
/// completion beyond it (only reachable for adversarial functions at n >= 5).
inline int min_sop_literals(int n, const std::vector<std::uint16_t>& on) {
  if (on.empty()) return 0;  // constant 0
  if (on.size() == (std::size_t{1} << n)) return 0;  // constant 1
  const auto primes = prime_implicants(n, on);

  detail::CoverSearch cs;
  cs.n = n;
  cs.primes = &primes;
  cs.node_budget = 2'000'000;
  const int space = 1 << n;
  cs.minterm_to_primes.assign(static_cast<std::size_t>(space), {});
  cs.prime_covers.assign(primes.size(), {});
  for (std::size_t p = 0; p < primes.size(); ++p) {
    for (auto m : on) {
      if (covers(primes[p], m)) {
        cs.minterm_to_primes[m].push_back(static_cast<int>(p));
        cs.prime_covers[p].push_back(m);
      }
    }
  }

  std::vector<int> cover_count(static_cast<std::size_t>(space), 0);
  long lits = 0;
  // Essential primes first: minterms covered by a single prime force it.
  std::vector<bool> chosen(primes.size(), false);
  for (auto m : on) {
    if (cs.minterm_to_primes[m].size() == 1) {
      const int p = cs.minterm_to_primes[m][0];
      if (!chosen[static_cast<std::size_t>(p)]) {
        chosen[static_cast<std::size_t>(p)] = true;
        lits += cs.literals(p);
        for (auto c : cs.prime_covers[static_cast<std::size_t>(p)])
          ++cover_count[c];
      }
    }
  }

  cs.search(cover_count, lits, on);
  if (cs.best >= 0 && !cs.exhausted) return static_cast<int>(cs.best);

  // Greedy fallback: repeatedly take the prime covering the most uncovered
  // minterms per literal.
  long greedy = lits;
  std::vector<bool> covered(static_cast<std::size_t>(space), false);
  for (auto m : on)
    if (cover_count[m] > 0) covered[m] = true;
  for (;;) {
    std::size_t best_p = primes.size();
    double best_score = 0.0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      int gain = 0;
      for (auto m : cs.prime_covers[p]) gain += !covered[m];
      if (gain == 0) continue;
      const double score =
          static_cast<double>(gain) / static_cast<double>(cs.literals(static_cast<int>(p)));
      if (score > best_score) {
        best_score = score;
        best_p = p;
      }
    }
    if (best_p == primes.size()) break;
    greedy += cs.literals(static_cast<int>(best_p));
    for (auto m : cs.prime_covers[best_p]) covered[m] = true;
  }
  if (cs.best >= 0) return static_cast<int>(std::min(cs.best, greedy));
  return static_cast<int>(greedy);
}

}  // namespace qm

/// Boolean normal-form complexity: the smaller literal count of the minimized
/// SOP of f and of its complement (the latter equals the POS literal count by
/// De Morgan). Constants score 0. Limited to n <= 7.
inline KValue boolean_nf_complexity(const BoolFn& f) {
  if (f.arity() > 7)
    throw std::invalid_argument("boolean_nf_complexity supports n <= 7");
  std::vector<std::uint16_t> on, off;
  for (int i = 0; i < f.size(); ++i)
    (f.get(i) ? on : off).push_back(static_cast<std::uint16_t>(i));
  if (on.empty() || off.empty()) return 0.0;
  const int sop = qm::min_sop_literals(f.arity(), on);
  const int pos = qm::min_sop_literals(f.arity(), off);
  return static_cast<double>(std::min(sop, pos));
}

inline KValue measure_complexity(const BoolFn& f, ComplexityMeasure m) {
  switch (m) {
    case ComplexityMeasure::kLZ: return lz_complexity(f);
    case ComplexityMeasure::kEntropy: return entropy_complexity(f);
    case ComplexityMeasure::kBooleanNF: return boolean_nf_complexity(f);
  }
  throw std::invalid_argument("unknown complexity measure");
}

}  // namespace boolbias
