#pragma once

// Test-side helpers and independent oracles. Nothing here calls the library
// routine it is used to check.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dp/relation.hpp"

namespace dpt {

using dp::ElementId;
using dp::Relation;

inline std::vector<ElementId> letters(std::size_t n) {
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

/// Relation over letters from index pairs.
inline Relation rel(std::size_t n, std::initializer_list<std::pair<int, int>> pairs) {
  Relation r(letters(n));
  for (auto [i, j] : pairs) r.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return r;
}

inline Relation random_relation(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  Relation r(letters(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) r.set(i, j);
  return r;
}

/// Every weak order on n elements as a level vector (0 = best), levels
/// forming a prefix of the naturals, in increasing lexicographic order.
inline std::vector<std::vector<std::size_t>> weak_orders(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> v(n, 0);
  while (true) {
    std::vector<bool> used(n, false);
    std::size_t top = 0;
    for (auto l : v) {
      used[l] = true;
      top = std::max(top, l);
    }
    if (std::all_of(used.begin(), used.begin() + static_cast<long>(top) + 1, [](bool b) { return b; })) out.push_back(v);
    std::size_t i = n;
    while (i > 0 && v[i - 1] == n - 1) v[--i] = 0;
    if (i == 0) break;
    ++v[i - 1];
  }
  return out;
}

inline Relation order_of(const std::vector<ElementId>& carrier, const std::vector<std::size_t>& levels) {
  Relation r(carrier);
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t j = 0; j < levels.size(); ++j)
      if (levels[i] <= levels[j]) r.set(i, j);
  return r;
}

inline std::size_t cells_differing(const Relation& a, const Relation& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) d += a.holds(i, j) != b.holds(i, j);
  return d;
}

inline Relation with_diagonal(const Relation& r) {
  Relation c = r;
  for (std::size_t i = 0; i < c.size(); ++i) c.set(i, i);
  return c;
}

struct KemenyOptimum {
  std::size_t distance = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> levels;
};

/// Minimum distance from the reflexive closure over all weak orders; first
/// (lexicographically smallest) level vector among optima.
inline KemenyOptimum kemeny_oracle(const Relation& r) {
  const Relation target = with_diagonal(r);
  KemenyOptimum best;
  for (const auto& levels : weak_orders(r.size())) {
    const std::size_t d = cells_differing(order_of(r.carrier(), levels), target);
    if (d < best.distance) best = {d, levels};
  }
  return best;
}

/// Fixpoint iteration of "add (i,k) when (i,j) and (j,k)".
inline Relation naive_closure(const Relation& r) {
  Relation c = r;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t k = 0; k < c.size(); ++k)
          if (c.holds(i, j) && c.holds(j, k) && !c.holds(i, k)) {
            c.set(i, k);
            changed = true;
          }
  }
  return c;
}

inline bool is_transitive(const Relation& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      for (std::size_t k = 0; k < c.size(); ++k)
        if (c.holds(i, j) && c.holds(j, k) && !c.holds(i, k)) return false;
  return true;
}

/// Profile dissimilarity: elements z on which x and y relate differently.
inline std::vector<std::vector<std::size_t>> dissimilarity(const Relation& r) {
  const Relation c = with_diagonal(r);
  const std::size_t n = c.size();
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, 0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        if (c.holds(x, z) != c.holds(y, z) || c.holds(z, x) != c.holds(z, y)) ++d[x][y];
  return d;
}

/// Minimum k-medoids cost over every assignment of elements to k non-empty
/// groups, each group scored by its best medoid.
inline std::size_t kmedoids_oracle(const std::vector<std::vector<std::size_t>>& d, std::size_t k) {
  const std::size_t n = d.size();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, 0);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = rest % k;
      rest /= k;
    }
    std::size_t cost = 0;
    bool empty = false;
    for (std::size_t g = 0; g < k && !empty; ++g) {
      std::size_t group_best = std::numeric_limits<std::size_t>::max();
      for (std::size_t m = 0; m < n; ++m) {
        if (label[m] != g) continue;
        std::size_t c = 0;
        for (std::size_t x = 0; x < n; ++x)
          if (label[x] == g) c += d[m][x];
        group_best = std::min(group_best, c);
      }
      if (group_best == std::numeric_limits<std::size_t>::max())
        empty = true;
      else
        cost += group_best;
    }
    if (!empty) best = std::min(best, cost);
  }
  return best;
}

/// Ordinary least squares fit y ~ a x + b; returns the largest residual.
inline double affine_residual(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double b = (sy - a * sx) / n;
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(a * x[i] + b - y[i]));
  return worst;
}

}  // namespace dpt
