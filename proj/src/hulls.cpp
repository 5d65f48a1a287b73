#include "suprelax/hulls.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>

#include "suprelax/error.hpp"

namespace suprelax {

namespace {

void require_1d(const PairMask& mask, const char* op) {
  if (mask.cloud()->dim() != 1)
    fail(ErrorKind::Domain, std::string(op) + " is only supported for d = 1 (cloud has d = " +
                                std::to_string(mask.cloud()->dim()) + ")");
}

// Fixed-width bitset sized at runtime; vertex sets for clique search.
class VertexSet {
 public:
  explicit VertexSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  void set(std::size_t v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void reset(std::size_t v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  bool test(std::size_t v) const { return (words_[v >> 6] >> (v & 63)) & 1U; }

  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::size_t count_and(const VertexSet& o) const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) c += static_cast<std::size_t>(std::popcount(words_[k] & o.words_[k]));
    return c;
  }

  VertexSet operator&(const VertexSet& o) const {
    VertexSet r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
    return r;
  }

  VertexSet operator|(const VertexSet& o) const {
    VertexSet r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] |= o.words_[k];
    return r;
  }

  VertexSet minus(const VertexSet& o) const {
    VertexSet r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
    return r;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        const int b = std::countr_zero(w);
        f(k * 64 + static_cast<std::size_t>(b));
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Bron-Kerbosch with Tomita pivoting over a compacted vertex numbering.
class CliqueSearch {
 public:
  CliqueSearch(std::vector<VertexSet> adj, std::size_t square_cap, std::atomic<std::size_t>& found)
      : adj_(std::move(adj)), cap_(square_cap), found_(found) {}

  void run(std::vector<std::size_t>& r, VertexSet p, VertexSet x) {
    if (p.none()) {
      if (x.none()) report(r);
      return;
    }
    // pivot maximizing |P n N(u)|
    std::size_t pivot = 0, best = 0;
    bool have = false;
    (p | x).for_each([&](std::size_t u) {
      const std::size_t c = p.count_and(adj_[u]);
      if (!have || c > best) {
        pivot = u;
        best = c;
        have = true;
      }
    });
    const VertexSet candidates = p.minus(adj_[pivot]);
    candidates.for_each([&](std::size_t v) {
      r.push_back(v);
      run(r, p & adj_[v], x & adj_[v]);
      r.pop_back();
      p.reset(v);
      x.set(v);
    });
  }

  std::vector<std::vector<std::size_t>> take() { return std::move(out_); }
  const std::vector<VertexSet>& adjacency() const { return adj_; }

 private:
  void report(const std::vector<std::size_t>& r) {
    if (found_.fetch_add(1) + 1 > cap_)
      fail(ErrorKind::Resource, "maximal square count exceeds the square cap of " + std::to_string(cap_));
    out_.push_back(r);
  }

  std::vector<VertexSet> adj_;
  std::size_t cap_;
  std::atomic<std::size_t>& found_;
  std::vector<std::vector<std::size_t>> out_;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a[0] + t * dx - p[0], ey = a[1] + t * dy - p[1];
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

// ---------------------------------------------------------------------------

PairMask separately_convex_hull(const PairMask& mask) { return separately_convex_hull(mask, PairMask(mask.cloud())); }

PairMask separately_convex_hull(const PairMask& mask, PairMask seed) {
  require_1d(mask, "separately_convex_hull");
  const std::size_t n = mask.size();
  PairMask h = std::move(seed);
  h |= mask;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = n, hi = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (h.test(i, j)) {
          lo = std::min(lo, j);
          hi = j;
        }
      for (std::size_t j = lo; j < n && j <= hi; ++j)
        if (!h.test(i, j)) {
          h.set(i, j);
          changed = true;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t lo = n, hi = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (h.test(i, j)) {
          lo = std::min(lo, i);
          hi = i;
        }
      for (std::size_t i = lo; i < n && i <= hi; ++i)
        if (!h.test(i, j)) {
          h.set(i, j);
          changed = true;
        }
    }
  }
  return h;
}

PairMask hat_subset(const PairMask& m) {
  PairMask out(m.cloud());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.test(i, j) && m.test(j, i) && m.test(i, i) && m.test(j, j)) out.set(i, j);
  return out;
}

SquareFamily maximal_squares(const PairMask& mask, const HullOptions& opts) {
  const std::size_t n = mask.size();
  std::vector<std::size_t> verts;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.test(i, i)) verts.push_back(i);
  if (verts.size() > opts.clique_vertex_cap)
    fail(ErrorKind::Resource, "clique search has " + std::to_string(verts.size()) +
                                  " vertices, above the clique cap of " + std::to_string(opts.clique_vertex_cap));

  SquareFamily fam{mask.cloud(), {}};
  const std::size_t m = verts.size();
  if (m == 0) return fam;

  std::vector<VertexSet> adj(m, VertexSet(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b && mask.test(verts[a], verts[b]) && mask.test(verts[b], verts[a])) adj[a].set(b);

  // Top-level branches of the pivoted search are independent once their
  // (P, X) sets are fixed, so they can be farmed out to threads.
  struct Branch {
    std::size_t v;
    VertexSet p, x;
  };
  std::vector<Branch> branches;
  {
    VertexSet p(m), x(m);
    for (std::size_t v = 0; v < m; ++v) p.set(v);
    std::size_t pivot = 0, best = 0;
    for (std::size_t u = 0; u < m; ++u) {
      const std::size_t c = p.count_and(adj[u]);
      if (u == 0 || c > best) {
        pivot = u;
        best = c;
      }
    }
    p.minus(adj[pivot]).for_each([&](std::size_t v) {
      branches.push_back({v, p & adj[v], x & adj[v]});
      p.reset(v);
      x.set(v);
    });
  }

  std::atomic<std::size_t> found{0};
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.threads, 1)), 1, branches.size());
  std::vector<std::vector<std::vector<std::size_t>>> results(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      CliqueSearch search(adj, opts.square_cap, found);
      std::vector<std::size_t> r;
      for (std::size_t b = w; b < branches.size(); b += workers) {
        r.assign(1, branches[b].v);
        search.run(r, branches[b].p, branches[b].x);
      }
      results[w] = search.take();
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (auto& part : results)
    for (auto& c : part) {
      for (auto& v : c) v = verts[v];
      std::sort(c.begin(), c.end());
      fam.squares.push_back(std::move(c));
    }
  std::sort(fam.squares.begin(), fam.squares.end());
  return fam;
}

Polytope convex_hull(std::vector<Point> pts, int dim) {
  Polytope poly;
  if (pts.empty()) return poly;
  auto lex = [](const Point& a, const Point& b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); };
  if (dim == 1) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), lex);
    poly.vertices.push_back(*lo);
    if ((*hi)[0] != (*lo)[0]) poly.vertices.push_back(*hi);
    return poly;
  }
  std::sort(pts.begin(), pts.end(), lex);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) {
    poly.vertices = pts;
    return poly;
  }
  // Andrew's monotone chain; collinear points are dropped.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 2) {
    // all points collinear: keep the two extremes
    hull = {pts.front(), pts.back()};
  }
  poly.vertices = std::move(hull);
  return poly;
}

double distance_to_polytope(const Polytope& poly, const Point& p, int dim) {
  const auto& v = poly.vertices;
  if (v.empty()) return INFINITY;
  if (dim == 1) {
    const double lo = v.front()[0], hi = v.back()[0];
    if (p[0] < lo) return lo - p[0];
    if (p[0] > hi) return p[0] - hi;
    return 0.0;
  }
  if (v.size() == 1) return distance(v[0], p, 2);
  if (v.size() == 2) return segment_distance(p, v[0], v[1]);
  bool inside = true;
  for (std::size_t k = 0; k < v.size() && inside; ++k) inside = cross(v[k], v[(k + 1) % v.size()], p) >= 0.0;
  if (inside) return 0.0;
  double d = INFINITY;
  for (std::size_t k = 0; k < v.size(); ++k) d = std::min(d, segment_distance(p, v[k], v[(k + 1) % v.size()]));
  return d;
}

PolytopeProductSet cartesian_hull(const PairMask& mask, const HullOptions& opts) {
  const int dim = mask.cloud()->dim();
  if (dim < 1 || dim > 2) fail(ErrorKind::Domain, "cartesian_hull supports d = 1 or 2 only");
  const SquareFamily fam = maximal_squares(mask, opts);
  PolytopeProductSet out{mask.cloud(), {}};
  const SlopeCloud& cloud = *mask.cloud();
  for (const auto& sq : fam.squares) {
    std::vector<Point> pts;
    pts.reserve(sq.size());
    for (auto i : sq) pts.push_back(cloud[i]);
    out.factors.push_back(convex_hull(std::move(pts), dim));
  }
  return out;
}

PairMask rasterize(const PolytopeProductSet& set, const CloudPtr& cloud) {
  if (set.cloud && set.cloud->dim() != cloud->dim())
    fail(ErrorKind::Domain, "rasterize: polytope and cloud dimensions differ");
  const int dim = cloud->dim();
  const double tol = 0.5 * cloud->spacing() * (1.0 + 1e-12);
  PairMask out(cloud);
  std::vector<std::size_t> members;
  for (const auto& q : set.factors) {
    members.clear();
    for (std::size_t i = 0; i < cloud->size(); ++i)
      if (distance_to_polytope(q, (*cloud)[i], dim) <= tol) members.push_back(i);
    for (auto i : members)
      for (auto j : members) out.set(i, j);
  }
  return out;
}

PairMask cartesian_hull_mask(const PairMask& mask, const HullOptions& opts) {
  return rasterize(cartesian_hull(mask, opts), mask.cloud());
}

bool has_basic_cartesian_convexification(const PairMask& mask, const HullOptions& opts) {
  const PairMask first = cartesian_hull_mask(mask, opts);
  return cartesian_hull_mask(first, opts) == first;
}

}  // namespace suprelax
