#include "suprelax/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "suprelax/error.hpp"
#include "suprelax/io.hpp"

namespace suprelax {

namespace {

void require_dim(const SlopeField& s, const SlopeCloud& cloud) {
  if (s.dim() != cloud.dim())
    fail(ErrorKind::Domain, "slope field has d = " + std::to_string(s.dim()) + " but the cloud has d = " +
                                std::to_string(cloud.dim()));
}

bool lex_less(const Point& p, const Point& q) { return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]); }

// Value of u at x using precomputed knot values.
Point eval_with_knots(const PwAffineFn& u, const std::vector<Point>& knots, double x) {
  const auto& s = u.derivative();
  const auto cells = s.cells();
  auto it = std::lower_bound(cells.begin(), cells.end(), x, [](const Cell& c, double v) { return c.right < v; });
  if (it == cells.end()) return knots.back();
  const auto i = static_cast<std::size_t>(it - cells.begin());
  const double dx = x - s.left(i);
  Point out = knots[i];
  for (int k = 0; k < s.dim(); ++k) out[k] += s.slope(i)[k] * dx;
  return out;
}

}  // namespace

std::vector<std::size_t> snap_slopes(const SlopeField& s, const SlopeCloud& cloud) {
  require_dim(s, cloud);
  const double tol = 0.5 * cloud.spacing() * (1.0 + 1e-12);
  std::vector<std::size_t> idx(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto hit = cloud.snap(s.slope(i), tol);
    if (!hit) {
      std::string p = format_real(s.slope(i)[0]);
      if (s.dim() == 2) p += ", " + format_real(s.slope(i)[1]);
      fail(ErrorKind::Domain, "slope (" + p + ") of cell " + std::to_string(i) +
                                  " is farther than h/2 from every cloud point");
    }
    idx[i] = *hit;
  }
  return idx;
}

std::vector<std::size_t> active_slopes(const SlopeField& s, const SlopeCloud& cloud) {
  const auto idx = snap_slopes(s, cloud);
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.length(i) > 0.0) act.push_back(idx[i]);
  std::sort(act.begin(), act.end());
  act.erase(std::unique(act.begin(), act.end()), act.end());
  return act;
}

double evaluate_sup(const DensityTable& w, const SlopeField& s) {
  const auto act = active_slopes(s, *w.cloud());
  double best = -std::numeric_limits<double>::infinity();
  for (auto i : act)
    for (auto j : act) best = std::max(best, w(i, j));
  return best;
}

PwAffineFn antiderivative(const SlopeField& s, const Point& base) { return PwAffineFn(base, s); }

bool feasibility(const PairMask& e, const SlopeField& s) {
  const auto act = active_slopes(s, *e.cloud());
  for (auto i : act)
    for (auto j : act)
      if (!e.test(i, j)) return false;
  return true;
}

double indicator_integral(const PairMask& k, const SlopeField& s) {
  return feasibility(k, s) ? 0.0 : std::numeric_limits<double>::infinity();
}

SlopeField refine(const SlopeField& s, std::size_t cells) {
  const std::size_t m = s.size();
  if (cells < m)
    fail(ErrorKind::Precondition, "refinement to " + std::to_string(cells) + " cells is below the current " +
                                      std::to_string(m));
  std::vector<Cell> out;
  out.reserve(cells);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t parts = cells / m + (i < cells % m ? 1 : 0);
    const double l = s.left(i), r = s.right(i);
    for (std::size_t p = 1; p <= parts; ++p) {
      const double x = p == parts ? r : l + (r - l) * static_cast<double>(p) / static_cast<double>(parts);
      out.push_back(Cell{x, s.slope(i)});
    }
  }
  return SlopeField(s.dim(), s.interval(), std::move(out));
}

SlopeField simple_approximation(const SlopeField& v, const PairMask& e, std::size_t cells) {
  const SlopeCloud& cloud = *e.cloud();
  require_dim(v, cloud);
  const SlopeField fine = refine(v, cells);
  const double h = cloud.spacing();
  const double reach = h * (1.0 + 1e-12);
  const int dim = cloud.dim();

  // Candidate cloud values per cell: within distance h, nearest first,
  // ties toward the lexicographically smaller point.
  std::vector<std::vector<std::size_t>> cand(fine.size());
  for (std::size_t c = 0; c < fine.size(); ++c) {
    const Point& target = fine.slope(c);
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (distance(cloud[i], target, dim) <= reach) cand[c].push_back(i);
    std::sort(cand[c].begin(), cand[c].end(), [&](std::size_t a, std::size_t b) {
      const double da = distance(cloud[a], target, dim), db = distance(cloud[b], target, dim);
      if (da != db) return da < db;
      return lex_less(cloud[a], cloud[b]);
    });
    if (cand[c].empty()) fail(ErrorKind::Domain, "cell " + std::to_string(c) + " has no cloud value within h");
  }

  std::vector<std::size_t> choice(fine.size());
  for (std::size_t c = 0; c < fine.size(); ++c) choice[c] = cand[c].front();

  auto compatible = [&](std::size_t c, std::size_t q) {
    if (!e.test(q, q)) return false;
    for (std::size_t o = 0; o < fine.size(); ++o) {
      if (o == c) continue;
      if (!e.test(q, choice[o]) || !e.test(choice[o], q)) return false;
    }
    return true;
  };

  for (std::size_t round = 0; round <= fine.size(); ++round) {
    bool changed = false;
    for (std::size_t c = 0; c < fine.size(); ++c) {
      if (compatible(c, choice[c])) continue;
      for (auto q : cand[c]) {
        if (q != choice[c] && compatible(c, q)) {
          choice[c] = q;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }

  std::string bad;
  for (std::size_t c = 0; c < fine.size(); ++c)
    if (!compatible(c, choice[c])) bad += (bad.empty() ? "" : ", ") + std::to_string(c);
  if (!bad.empty()) fail(ErrorKind::Domain, "no admissible cloud value inside the target set for cells " + bad);

  std::vector<Cell> out(fine.cells().begin(), fine.cells().end());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].slope = cloud[choice[c]];
  return SlopeField(v.dim(), v.interval(), std::move(out));
}

double sup_distance(const PwAffineFn& u, const PwAffineFn& v) {
  const auto& su = u.derivative();
  const auto& sv = v.derivative();
  if (su.interval().a != sv.interval().a || su.interval().b != sv.interval().b || su.dim() != sv.dim())
    fail(ErrorKind::Precondition, "sup_distance needs functions on the same interval and dimension");
  std::vector<double> xs{su.interval().a};
  for (const auto& c : su.cells()) xs.push_back(c.right);
  for (const auto& c : sv.cells()) xs.push_back(c.right);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const auto ku = u.knot_values();
  const auto kv = v.knot_values();
  double best = 0.0;
  for (double x : xs) {
    const Point a = eval_with_knots(u, ku, x);
    const Point b = eval_with_knots(v, kv, x);
    best = std::max(best, distance(a, b, su.dim()));
  }
  return best;
}

}  // namespace suprelax
