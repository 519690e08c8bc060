#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "boolbias/boolean_minimize.hpp"
#include "boolbias/boolfunc.hpp"
#include "boolbias/complexity.hpp"
#include "boolbias/network.hpp"
#include "boolbias/parallel.hpp"
#include "boolbias/rng.hpp"

namespace boolbias {

/// Frequency table over sampled functions; the empirical estimate of the
/// prior P(f). Merging partial censuses is associative and commutative, so
/// worker results can be combined in any order.
struct FnCensus {
  std::unordered_map<BoolFn, std::uint64_t, BoolFnHash> counts;
  std::uint64_t total = 0;
  int n = 0;
  std::optional<NetConfig> cfg;  // absent for uniform-string censuses
  std::uint64_t seed = 0;

  void add(const BoolFn& f, std::uint64_t c = 1) {
    counts[f] += c;
    total += c;
  }

  void merge(const FnCensus& other) {
    for (const auto& [f, c] : other.counts) counts[f] += c;
    total += other.total;
  }

  /// Entries in canonical order: count descending, then bits ascending.
  std::vector<std::pair<BoolFn, std::uint64_t>> sorted_entries() const {
    std::vector<std::pair<BoolFn, std::uint64_t>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    return v;
  }
};

/// Draws n_samples parameter sets, thresholds each into a function and counts
/// them. Sample i always uses the generator derived from (seed, i), so the
/// census is identical for any worker count.
inline FnCensus sample_prior(const NetConfig& cfg, std::uint64_t n_samples,
                             std::uint64_t seed, unsigned workers = 0) {
  cfg.validate();
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const unsigned w = effective_workers(workers);
  std::vector<FnCensus> partial(w);
  parallel_regions(n_samples, w, [&](unsigned wid, std::uint64_t b, std::uint64_t e) {
    ForwardWorkspace ws;
    FnCensus& local = partial[wid];
    for (std::uint64_t i = b; i < e; ++i) {
      Rng rng(seed, i);
      const ParamSet p = sample_params(cfg, rng);
      local.add(to_function(p, cfg, ws));
    }
  });
  FnCensus out;
  out.n = cfg.n_in;
  out.cfg = cfg;
  out.seed = seed;
  for (auto& part : partial) out.merge(part);
  return out;
}

/// Census of i.i.d. fair-coin strings of length L (a power of two).
inline FnCensus uniform_string_census(int length, std::uint64_t n_samples,
                                      std::uint64_t seed, unsigned workers = 0) {
  if (length < 4 || (length & (length - 1)) != 0)
    throw std::invalid_argument("length must be a power of two >= 4");
  int n = 0;
  while ((1 << n) != length) ++n;
  if (n > BoolFn::kMaxArity)
    throw std::invalid_argument("length exceeds the supported arity range");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");

  const unsigned w = effective_workers(workers);
  std::vector<FnCensus> partial(w);
  const int words = (length + 63) / 64;
  parallel_regions(n_samples, w, [&](unsigned wid, std::uint64_t b, std::uint64_t e) {
    FnCensus& local = partial[wid];
    for (std::uint64_t i = b; i < e; ++i) {
      Rng rng(seed, i);
      BoolFn f(n);
      for (int k = 0; k < words; ++k) f.set_word(k, rng.next_u64());
      local.add(f);
    }
  });
  FnCensus out;
  out.n = n;
  out.seed = seed;
  for (auto& part : partial) out.merge(part);
  return out;
}

/// Groups the census mass by complexity: P(K) = sum of P(f) over f with
/// K(f) = K.
inline ComplexityDist complexity_marginal(const FnCensus& census,
                                          ComplexityMeasure measure,
                                          unsigned workers = 0) {
  if (census.total == 0) throw std::invalid_argument("census is empty");
  std::vector<const std::pair<const BoolFn, std::uint64_t>*> entries;
  entries.reserve(census.counts.size());
  for (const auto& e : census.counts) entries.push_back(&e);

  const unsigned w = effective_workers(workers);
  std::vector<std::map<KValue, double>> partial(w);
  parallel_regions(entries.size(), w, [&](unsigned wid, std::uint64_t b, std::uint64_t e) {
    auto& local = partial[wid];
    for (std::uint64_t i = b; i < e; ++i) {
      const auto& [fn, count] = *entries[i];
      local[measure_complexity(fn, measure)] +=
          static_cast<double>(count) / static_cast<double>(census.total);
    }
  });
  ComplexityDist d;
  d.measure = measure;
  for (auto& part : partial)
    for (const auto& [k, p] : part) d.mass[k] += p;
  return d;
}

/// Log-linear extrapolation of P(K) into the unobserved low-K bins on the
/// half-log2(L) grid. Observed bins are kept as-is; the result is labeled and
/// never merged silently. `anchor` pins the line through the exact value at
/// the lowest grid point (the two constant strings under uniform sampling);
/// without it the line is the least-squares fit over the observed bins.
inline ComplexityDist extrapolate_low_k(
    const ComplexityDist& d, int n,
    std::optional<std::pair<double, double>> anchor = std::nullopt) {
  if (d.mass.empty()) throw std::invalid_argument("empty distribution");
  const double step = lz_bin_width(n);
  const double k_min_grid = static_cast<double>(n);
  const double k_low = d.mass.begin()->first;

  double slope, intercept;  // log2 P(K) = slope*K + intercept
  if (anchor) {
    const auto [k0, p0] = *anchor;
    slope = (std::log2(d.mass.begin()->second) - std::log2(p0)) / (k_low - k0);
    intercept = std::log2(p0) - slope * k0;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double count = 0;
    for (const auto& [k, p] : d.mass) {
      if (p <= 0) continue;
      const double y = std::log2(p);
      sx += k;
      sy += y;
      sxx += k * k;
      sxy += k * y;
      count += 1;
    }
    if (count < 2) throw std::invalid_argument("need two observed bins to fit");
    slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    intercept = (sy - slope * sx) / count;
  }

  ComplexityDist out = d;
  out.extrapolated = true;
  for (double k = k_min_grid; k < k_low - step / 2; k += step)
    out.mass[k] = std::exp2(slope * k + intercept);
  return out;
}

struct RankPoint {
  std::uint64_t rank;
  double probability;
};

/// Empirical probabilities sorted descending; ranks start at 1.
inline std::vector<RankPoint> rank_distribution(const FnCensus& census) {
  if (census.total == 0) throw std::invalid_argument("census is empty");
  const auto entries = census.sorted_entries();
  std::vector<RankPoint> out;
  out.reserve(entries.size());
  std::uint64_t rank = 1;
  for (const auto& [fn, count] : entries)
    out.push_back({rank++, static_cast<double>(count) /
                               static_cast<double>(census.total)});
  return out;
}

/// Zipf reference P(f) = 1/(ln(N_f) * rank) with N_f = 2^(2^n).
inline double zipf_prior(int n, std::uint64_t rank) {
  const double ln_nf = std::pow(2.0, n) * std::log(2.0);
  return 1.0 / (ln_nf * static_cast<double>(rank));
}

/// Sampling estimate of a probability that never reports zero: when no hit is
/// observed the floor 1/n_samples is reported and flagged.
struct MarginalEstimate {
  std::uint64_t hits = 0;
  std::uint64_t n_samples = 0;

  bool floored() const { return hits == 0; }
  double value() const {
    return floored() ? 1.0 / static_cast<double>(n_samples)
                     : static_cast<double>(hits) / static_cast<double>(n_samples);
  }
};

/// Probability that a randomly initialized network reproduces every label in
/// S, i.e. the marginal likelihood P(S) estimated by sampling. An empty S is
/// vacuously satisfied.
inline MarginalEstimate marginal_likelihood(
    const NetConfig& cfg, const std::vector<std::pair<int, bool>>& s,
    std::uint64_t n_samples, std::uint64_t seed, unsigned workers = 0) {
  cfg.validate();
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (s.empty()) return {n_samples, n_samples};
  for (const auto& [idx, label] : s) {
    (void)label;
    if (idx < 0 || idx >= (1 << cfg.n_in))
      throw std::invalid_argument("label index out of range");
  }
  const unsigned w = effective_workers(workers);
  std::vector<std::uint64_t> hits(w, 0);
  parallel_regions(n_samples, w, [&](unsigned wid, std::uint64_t b, std::uint64_t e) {
    ForwardWorkspace ws;
    for (std::uint64_t i = b; i < e; ++i) {
      Rng rng(seed, i);
      const ParamSet p = sample_params(cfg, rng);
      forward_all(p, cfg, ws);
      bool ok = true;
      for (const auto& [idx, label] : s) {
        if ((ws.out[idx] > 0.0) != label) {
          ok = false;
          break;
        }
      }
      hits[wid] += ok;
    }
  });
  std::uint64_t h = 0;
  for (auto v : hits) h += v;
  return {h, n_samples};
}

/// Upper-envelope fit of the simplicity-bias bound: the least-squares line
/// through the per-K maxima of log2 P(f), reported as P(f) <= 2^(-a*K + b).
struct SimplicityFit {
  double a = 0.0;
  double b = 0.0;
};

inline SimplicityFit fit_simplicity_bound(const FnCensus& census,
                                          ComplexityMeasure measure) {
  if (census.total == 0) throw std::invalid_argument("census is empty");
  std::map<KValue, double> max_p;
  for (const auto& [fn, count] : census.counts) {
    const KValue k = measure_complexity(fn, measure);
    const double p =
        static_cast<double>(count) / static_cast<double>(census.total);
    auto [it, inserted] = max_p.emplace(k, p);
    if (!inserted && p > it->second) it->second = p;
  }
  if (max_p.size() < 2)
    throw std::runtime_error("simplicity fit needs at least two complexity bins");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(max_p.size());
  for (const auto& [k, p] : max_p) {
    const double y = std::log2(p);
    sx += k;
    sy += y;
    sxx += k * k;
    sxy += k * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / count;
  return {-slope, intercept};
}

}  // namespace boolbias
