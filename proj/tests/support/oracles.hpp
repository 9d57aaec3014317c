#pragma once

// Test-only reference computations. Nothing here calls into the library's
// estimators, divergence or simulation code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace twostage::testing {

inline double log_factorial(std::int64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// Calls visit(counts, probability) for every composition of n into
/// probs.size() parts, with its multinomial probability.
inline void enumerate_multinomial(std::int64_t n, const std::vector<double>& probs,
                                  const std::function<void(const std::vector<std::int64_t>&, double)>& visit) {
  std::vector<std::int64_t> counts(probs.size(), 0);
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t k, std::int64_t left) {
    if (k + 1 == probs.size()) {
      counts[k] = left;
      double log_p = log_factorial(n);
      for (std::size_t j = 0; j < probs.size(); ++j) {
        log_p += counts[j] * std::log(probs[j]) - log_factorial(counts[j]);
      }
      visit(counts, std::exp(log_p));
      return;
    }
    for (std::int64_t x = 0; x <= left; ++x) {
      counts[k] = x;
      rec(k + 1, left - x);
    }
  };
  rec(0, n);
}

/// Plain sum e log(e/t) over positive e.
inline double reference_kl(const std::vector<double>& e, const std::vector<double>& t) {
  double total = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] > 0.0) total += e[i] * std::log(e[i] / t[i]);
  }
  return total;
}

/// Probability that a multinomial(n, marginals) draw leaves at least one
/// group empty, by inclusion-exclusion over subsets of groups.
inline double empty_group_probability(const std::vector<double>& marginals, std::int64_t n) {
  const std::size_t groups = marginals.size();
  double total = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << groups); ++mask) {
    double mass = 0.0;
    int size = 0;
    for (std::size_t i = 0; i < groups; ++i) {
      if (mask & (std::uint64_t{1} << i)) {
        mass += marginals[i];
        ++size;
      }
    }
    const double term = std::pow(std::max(0.0, 1.0 - mass), static_cast<double>(n));
    total += (size % 2 == 1) ? term : -term;
  }
  return total;
}

/// Random strictly positive two-stage table with I groups of 1..max_cells
/// cells, normalized to sum 1.
inline std::vector<std::vector<double>> random_table(std::mt19937_64& rng, std::size_t groups,
                                                     std::size_t max_cells, double floor = 0.02) {
  std::uniform_int_distribution<std::size_t> cells(1, max_cells);
  std::uniform_real_distribution<double> weight(floor, 1.0);
  std::vector<std::vector<double>> table(groups);
  double total = 0.0;
  for (auto& row : table) {
    row.resize(cells(rng));
    for (double& v : row) {
      v = weight(rng);
      total += v;
    }
  }
  for (auto& row : table) {
    for (double& v : row) v /= total;
  }
  return table;
}

}  // namespace twostage::testing
