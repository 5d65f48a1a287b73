#pragma once

// Generators and brute-force reference computations shared by the tests.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "suprelax/lattice.hpp"

namespace testsupport {

using suprelax::CloudPtr;
using suprelax::DensityTable;
using suprelax::PairMask;
using suprelax::Point;
using suprelax::SlopeCloud;
using suprelax::SlopeField;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline CloudPtr line_cloud(int n, double lo, double hi) { return suprelax::share(SlopeCloud::uniform(1, n, lo, hi)); }

inline PairMask random_mask(const CloudPtr& cloud, Rng& rng, double density) {
  PairMask m(cloud);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (rng.coin(density)) m.set(i, j);
  return m;
}

// A few random axis-aligned blocks; sparse enough that hulls stay nontrivial.
inline PairMask random_block_mask(const CloudPtr& cloud, Rng& rng, int blocks) {
  PairMask m(cloud);
  const std::size_t n = m.size();
  for (int b = 0; b < blocks; ++b) {
    const std::size_t i = rng.index(n), j = rng.index(n);
    const std::size_t di = rng.index(3), dj = rng.index(3);
    for (std::size_t r = i; r < std::min(n, i + di + 1); ++r)
      for (std::size_t c = j; c < std::min(n, j + dj + 1); ++c) m.set(r, c);
  }
  return m;
}

// W(i,j) = max(f_i, f_j, g_ij) with g symmetric is symmetric and diagonal.
// `penalty` grows g with the slope distance, which keeps sublevel graphs
// close to interval graphs and the clique counts small.
inline DensityTable random_symmetric_diagonal(const CloudPtr& cloud, Rng& rng, double penalty = 0.0,
                                              int quantize = 0) {
  const std::size_t n = cloud->size();
  auto q = [&](double v) { return quantize > 0 ? std::round(v * quantize) / quantize : v; };
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (int k = 0; k < cloud->dim(); ++k) norm = std::max(norm, std::abs((*cloud)[i][k]));
    f[i] = q(rng.uniform() + 0.5 * norm);
  }
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double dist = 0.0;
      for (int k = 0; k < cloud->dim(); ++k) dist = std::max(dist, std::abs((*cloud)[i][k] - (*cloud)[j][k]));
      const double g = i == j ? 0.0 : q(penalty * dist + 0.3 * rng.uniform());
      v[i * n + j] = v[j * n + i] = std::max({f[i], f[j], g});
    }
  return DensityTable(cloud, std::move(v));
}

inline DensityTable random_table(const CloudPtr& cloud, Rng& rng, int levels) {
  std::vector<double> v(cloud->size() * cloud->size());
  for (auto& x : v) x = static_cast<double>(rng.integer(0, levels - 1));
  return DensityTable(cloud, std::move(v));
}

inline SlopeField random_field(Rng& rng, const SlopeCloud& cloud, std::size_t max_cells) {
  const std::size_t m = 1 + rng.index(max_cells);
  std::vector<double> cuts(m - 1);
  for (auto& c : cuts) c = rng.uniform();
  std::sort(cuts.begin(), cuts.end());
  std::vector<suprelax::Cell> cells;
  for (std::size_t i = 0; i < m; ++i) {
    suprelax::Cell c;
    c.right = i + 1 < m ? cuts[i] : 1.0;
    c.slope = cloud[rng.index(cloud.size())];
    cells.push_back(c);
  }
  return SlopeField(cloud.dim(), suprelax::Interval{0.0, 1.0}, std::move(cells));
}

// ---------------------------------------------------------------- reference hull (d = 1)

// Least superset closed under the rule "two set cells in a row or column
// force every cell between them". Plain fixed-point iteration over triples.
inline std::vector<std::uint8_t> reference_sc_hull(const PairMask& mask) {
  const std::size_t n = mask.size();
  std::vector<std::uint8_t> s(mask.bits().begin(), mask.bits().end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 2; k < n; ++k) {
          if (s[i * n + j] && s[i * n + k])
            for (std::size_t l = j + 1; l < k; ++l)
              if (!s[i * n + l]) s[i * n + l] = 1, changed = true;
          if (s[j * n + i] && s[k * n + i])
            for (std::size_t l = j + 1; l < k; ++l)
              if (!s[l * n + i]) s[l * n + i] = 1, changed = true;
        }
  }
  return s;
}

// ---------------------------------------------------------------- reference maximal squares

// All maximal A (nonempty) with A x A inside the mask, by enumerating every
// subset of indices. Only for n <= 16.
inline std::set<std::vector<std::size_t>> reference_maximal_squares(const PairMask& mask) {
  const std::size_t n = mask.size();
  auto is_square = [&](std::uint32_t s) {
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1u)
        for (std::size_t j = 0; j < n; ++j)
          if ((s >> j & 1u) && !mask.test(i, j)) return false;
    return true;
  };
  std::vector<std::uint8_t> square(std::size_t{1} << n, 0);
  for (std::uint32_t s = 1; s < (1u << n); ++s) square[s] = is_square(s);
  std::set<std::vector<std::size_t>> out;
  for (std::uint32_t s = 1; s < (1u << n); ++s) {
    if (!square[s]) continue;
    bool maximal = true;
    for (std::size_t i = 0; i < n && maximal; ++i)
      if (!(s >> i & 1u) && square[s | (1u << i)]) maximal = false;
    if (!maximal) continue;
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1u) a.push_back(i);
    out.insert(a);
  }
  return out;
}

// ---------------------------------------------------------------- reference pair scan (d = 1)

struct PairScan {
  double value = std::numeric_limits<double>::infinity();
  std::size_t lo = 0, hi = 0;
};

// min over index pairs a <= b with x_a <= min target slope and x_b >= max
// target slope of max(W(a,a), W(a,b), W(b,a), W(b,b)).
inline PairScan reference_pair_scan(const DensityTable& w, double tmin, double tmax, double tol) {
  const auto& cloud = *w.cloud();
  PairScan best;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (cloud[a][0] > tmin + tol) continue;
    for (std::size_t b = a; b < w.size(); ++b) {
      if (cloud[b][0] < tmax - tol) continue;
      const double v = std::max({w(a, a), w(a, b), w(b, a), w(b, b)});
      if (v < best.value) best = {v, a, b};
    }
  }
  return best;
}

// Supremum of W over pairs of target cell slopes, evaluated by nearest index.
inline double reference_energy(const DensityTable& w, const SlopeField& s) {
  const auto& cloud = *w.cloud();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.length(i) > 0.0)) continue;
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      double d = 0.0;
      for (int k = 0; k < cloud.dim(); ++k) d += (cloud[p][k] - s.slope(i)[k]) * (cloud[p][k] - s.slope(i)[k]);
      if (d < bd) bd = d, best = p;
    }
    idx.push_back(best);
  }
  double j = -std::numeric_limits<double>::infinity();
  for (auto a : idx)
    for (auto b : idx) j = std::max(j, w(a, b));
  return j;
}

}  // namespace testsupport
