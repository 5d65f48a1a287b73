#include "suprelax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "suprelax/error.hpp"
#include "suprelax/functionals.hpp"
#include "suprelax/io.hpp"

namespace suprelax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
  double value = kInf;
  std::vector<std::size_t> set;

  // Order: value, then cardinality, then lexicographic.
  bool beats(const Best& o) const {
    if (set.empty()) return false;
    if (o.set.empty()) return true;
    if (value != o.value) return value < o.value;
    if (set.size() != o.set.size()) return set.size() < o.set.size();
    return set < o.set;
  }
};

class SubsetSearch {
 public:
  SubsetSearch(const DensityTable& w, std::span<const Point> targets, double tol)
      : w_(w), cloud_(*w.cloud()), targets_(targets), tol_(tol) {
    if (cloud_.dim() == 1) {
      tmin_ = kInf;
      tmax_ = -kInf;
      for (const auto& t : targets_) {
        tmin_ = std::min(tmin_, t[0]);
        tmax_ = std::max(tmax_, t[0]);
      }
    }
  }

  // Subsets whose smallest element lies in `firsts`, sizes 1..cap.
  Best run(std::span<const std::size_t> firsts, std::size_t cap) {
    std::vector<std::size_t> cur;
    for (std::size_t size = 1; size <= cap; ++size) {
      for (auto f : firsts) {
        if (cloud_.dim() == 1 && cloud_[f][0] > tmin_ + tol_) continue;
        cur.assign(1, f);
        dfs(cur, f + 1, w_(f, f), size);
      }
    }
    return best_;
  }

 private:
  bool admissible(const std::vector<std::size_t>& set) const {
    if (cloud_.dim() == 1) {
      // sorted ascending, so the hull is [front, back]
      return cloud_[set.front()][0] <= tmin_ + tol_ && cloud_[set.back()][0] >= tmax_ - tol_;
    }
    std::vector<Point> pts;
    for (auto i : set) pts.push_back(cloud_[i]);
    const Polytope hull = convex_hull(std::move(pts), 2);
    for (const auto& t : targets_)
      if (distance_to_polytope(hull, t, 2) > tol_) return false;
    return true;
  }

  void dfs(std::vector<std::size_t>& cur, std::size_t start, double running, std::size_t size) {
    if (!best_.set.empty() && running >= best_.value) return;
    if (cur.size() == size) {
      if (admissible(cur)) {
        best_.value = running;
        best_.set = cur;
      }
      return;
    }
    const std::size_t n = cloud_.size();
    for (std::size_t i = start; i + (size - cur.size()) <= n; ++i) {
      double m = std::max(running, w_(i, i));
      for (auto c : cur) m = std::max({m, w_(c, i), w_(i, c)});
      if (!best_.set.empty() && m >= best_.value) continue;
      cur.push_back(i);
      dfs(cur, i + 1, m, size);
      cur.pop_back();
    }
  }

  const DensityTable& w_;
  const SlopeCloud& cloud_;
  std::span<const Point> targets_;
  double tol_;
  double tmin_ = 0.0, tmax_ = 0.0;
  Best best_;
};

Best general_search(const DensityTable& w, std::span<const Point> targets, double tol, std::size_t cap, int threads) {
  const std::size_t n = w.size();
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, n);
  std::vector<Best> results(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t k) {
    try {
      std::vector<std::size_t> firsts;
      for (std::size_t f = k; f < n; f += workers) firsts.push_back(f);
      SubsetSearch search(w, targets, tol);
      results[k] = search.run(firsts, cap);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work, k);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Best best;
  for (auto& r : results)
    if (r.beats(best)) best = std::move(r);
  return best;
}

// d = 1: any admissible set contains its extremes, which are admissible on
// their own with no larger value, so singletons and pairs suffice. Scan order
// matches general_search (singletons, then pairs lexicographically).
Best pair_search(const DensityTable& w, std::span<const Point> targets, double tol) {
  const SlopeCloud& cloud = *w.cloud();
  double tmin = kInf, tmax = -kInf;
  for (const auto& t : targets) {
    tmin = std::min(tmin, t[0]);
    tmax = std::max(tmax, t[0]);
  }
  Best best;
  const std::size_t n = cloud.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cloud[i][0];
    if (x <= tmin + tol && x >= tmax - tol && (best.set.empty() || w(i, i) < best.value)) {
      best.value = w(i, i);
      best.set = {i};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cloud[i][0] > tmin + tol) break;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cloud[j][0] < tmax - tol) continue;
      const double v = std::max({w(i, i), w(i, j), w(j, i), w(j, j)});
      if (best.set.empty() || v < best.value) {
        best.value = v;
        best.set = {i, j};
      }
    }
  }
  return best;
}

// Convex weights over `pts` whose mean is the point of conv(pts) closest to t.
std::vector<double> convex_weights(std::span<const Point> pts, const Point& t, int dim) {
  const std::size_t m = pts.size();
  std::vector<double> wts(m, 0.0);
  if (m == 1) {
    wts[0] = 1.0;
    return wts;
  }
  if (dim == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 1; k < m; ++k) {
      if (pts[k][0] < pts[lo][0]) lo = k;
      if (pts[k][0] > pts[hi][0]) hi = k;
    }
    const double span = pts[hi][0] - pts[lo][0];
    const double lam = span > 0.0 ? std::clamp((pts[hi][0] - t[0]) / span, 0.0, 1.0) : 1.0;
    wts[lo] += lam;
    wts[hi] += 1.0 - lam;
    return wts;
  }

  double best_d = kInf;
  auto consider = [&](double d, std::vector<double> cand) {
    if (d < best_d) {
      best_d = d;
      wts = std::move(cand);
    }
  };
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<double> c(m, 0.0);
    c[a] = 1.0;
    consider(distance(pts[a], t, 2), std::move(c));
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const double dx = pts[b][0] - pts[a][0], dy = pts[b][1] - pts[a][1];
      const double len2 = dx * dx + dy * dy;
      if (len2 == 0.0) continue;
      const double s = std::clamp(((t[0] - pts[a][0]) * dx + (t[1] - pts[a][1]) * dy) / len2, 0.0, 1.0);
      const Point p{pts[a][0] + s * dx, pts[a][1] + s * dy};
      std::vector<double> c(m, 0.0);
      c[a] = 1.0 - s;
      c[b] = s;
      consider(distance(p, t, 2), std::move(c));
    }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        const Point &A = pts[a], &B = pts[b], &C = pts[c];
        const double det = (B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]);
        if (det == 0.0) continue;
        const double l1 = ((B[0] - t[0]) * (C[1] - t[1]) - (C[0] - t[0]) * (B[1] - t[1])) / det;
        const double l2 = ((C[0] - t[0]) * (A[1] - t[1]) - (A[0] - t[0]) * (C[1] - t[1])) / det;
        const double l3 = 1.0 - l1 - l2;
        if (l1 < 0.0 || l2 < 0.0 || l3 < 0.0) continue;
        std::vector<double> cw(m, 0.0);
        cw[a] = l1;
        cw[b] = l2;
        cw[c] = l3;
        consider(0.0, std::move(cw));
      }
  return wts;
}

void require_symmetric_diagonal(const DensityTable& w) {
  if (!w.is_symmetric() || !w.is_diagonal())
    fail(ErrorKind::Precondition, "relax_oracle requires a symmetric diagonal density; apply hat_density first");
}

RelaxReport relax_impl(const DensityTable& w, const SlopeField& target, const EnvelopeResult* envelope,
                       const RelaxOptions& opts) {
  require_symmetric_diagonal(w);
  const SlopeCloud& cloud = *w.cloud();
  const int dim = cloud.dim();
  const double h = cloud.spacing();
  // Targets are snapped onto the cloud first, so admissibility is plain
  // containment up to rounding.
  const double tol = 1e-9 * h;

  RelaxReport rep{target, h, std::nullopt, std::nullopt, {}, {}, std::nullopt};

  const auto cell_idx = snap_slopes(target, cloud);
  const auto active = active_slopes(target, cloud);
  std::vector<Point> targets;
  for (auto i : active) targets.push_back(cloud[i]);

  const Best best = (dim == 1 && !opts.exhaustive && opts.subset_cap >= 2)
                        ? pair_search(w, targets, tol)
                        : general_search(w, targets, tol, opts.subset_cap, opts.hull.threads);

  if (!best.set.empty()) {
    rep.oracle_value = best.value;
    rep.witness.indices = best.set;
    for (auto i : best.set) rep.witness.slopes.push_back(cloud[i]);
    for (std::size_t c = 0; c < target.size(); ++c)
      rep.witness.weights.push_back(convex_weights(rep.witness.slopes, cloud[cell_idx[c]], dim));
  }

  std::optional<EnvelopeResult> computed;
  if (!envelope) {
    try {
      computed = dim == 1 ? slc_envelope(w) : cartesian_lc_envelope(w, opts.hull);
      envelope = &*computed;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Domain && e.kind() != ErrorKind::Resource) throw;
      rep.envelope_note = e.what();
    }
  }
  if (envelope) {
    if (!same_cloud(envelope->table.cloud(), w.cloud()))
      fail(ErrorKind::Precondition, "envelope and density live on different clouds");
    double v = -kInf;
    for (auto i : active)
      for (auto j : active) v = std::max(v, envelope->table(i, j));
    rep.envelope_value = v;
  }
  if (rep.oracle_value && rep.envelope_value) rep.gap = std::abs(*rep.oracle_value - *rep.envelope_value);
  return rep;
}

}  // namespace

RelaxReport relax_oracle(const DensityTable& w, const SlopeField& target, const RelaxOptions& opts) {
  return relax_impl(w, target, nullptr, opts);
}

RelaxReport relax_oracle(const DensityTable& w, const SlopeField& target, const EnvelopeResult& envelope,
                         const RelaxOptions& opts) {
  return relax_impl(w, target, &envelope, opts);
}

Oscillation oscillation_sequence(std::span<const Point> slopes, const std::vector<std::vector<double>>& weights,
                                 const SlopeField& target, std::size_t k, double tol, const Point& base) {
  const int dim = target.dim();
  if (k < 1) fail(ErrorKind::Precondition, "oscillation needs k >= 1");
  if (slopes.empty()) fail(ErrorKind::Precondition, "oscillation needs at least one slope");
  if (weights.size() != target.size())
    fail(ErrorKind::Precondition, "expected one weight vector per target cell (" + std::to_string(target.size()) +
                                      "), got " + std::to_string(weights.size()));

  for (std::size_t c = 0; c < target.size(); ++c) {
    const auto& wc = weights[c];
    if (wc.size() != slopes.size())
      fail(ErrorKind::Precondition, "cell " + std::to_string(c) + " has " + std::to_string(wc.size()) +
                                        " weights for " + std::to_string(slopes.size()) + " slopes");
    double sum = 0.0;
    Point mean{};
    for (std::size_t a = 0; a < wc.size(); ++a) {
      if (wc[a] < 0.0) fail(ErrorKind::Precondition, "negative weight in cell " + std::to_string(c));
      sum += wc[a];
      for (int d = 0; d < dim; ++d) mean[d] += wc[a] * slopes[a][d];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorKind::Precondition, "weights of cell " + std::to_string(c) + " sum to " + format_real(sum));
    if (distance(mean, target.slope(c), dim) > tol)
      fail(ErrorKind::Precondition, "weighted mean of cell " + std::to_string(c) + " misses the target slope by " +
                                        format_real(distance(mean, target.slope(c), dim)));
  }

  std::vector<Cell> cells;
  for (std::size_t c = 0; c < target.size(); ++c) {
    const double l = target.left(c), r = target.right(c);
    for (std::size_t blk = 0; blk < k; ++blk) {
      const double bl = l + (r - l) * static_cast<double>(blk) / static_cast<double>(k);
      const double br = blk + 1 == k ? r : l + (r - l) * static_cast<double>(blk + 1) / static_cast<double>(k);
      std::size_t last = slopes.size();
      while (last > 0 && weights[c][last - 1] <= 0.0) --last;
      double x = bl, acc = 0.0;
      for (std::size_t a = 0; a < last; ++a) {
        if (weights[c][a] <= 0.0) continue;
        acc += weights[c][a];
        const double right = a + 1 == last ? br : bl + (br - bl) * acc;
        if (!(right > x)) continue;
        cells.push_back(Cell{right, slopes[a]});
        x = right;
      }
    }
  }
  SlopeField field(dim, target.interval(), std::move(cells));
  PwAffineFn fn(base, std::move(field));
  const double dist = sup_distance(fn, PwAffineFn(base, target));
  return Oscillation{std::move(fn), dist};
}

const char* verdict_text(LscVerdict v) {
  return v == LscVerdict::Violated ? "lsc violated" : "consistent with lsc";
}

LscReport lsc_experiment(const DensityTable& w, const SlopeField& target, std::span<const std::size_t> k_list,
                         const RelaxOptions& opts) {
  LscReport rep{relax_oracle(w, target, opts), evaluate_sup(w, target), {}, 0.0, LscVerdict::Consistent};
  const RelaxReport& rx = rep.relax;
  if (!rx.oracle_value)
    fail(ErrorKind::Resource, "no admissible slope set within the subset cap of " + std::to_string(opts.subset_cap));

  const SlopeCloud& cloud = *w.cloud();
  const auto cell_idx = snap_slopes(target, cloud);
  std::vector<Cell> snapped(target.cells().begin(), target.cells().end());
  for (std::size_t c = 0; c < snapped.size(); ++c) snapped[c].slope = cloud[cell_idx[c]];
  const SlopeField snapped_target(target.dim(), target.interval(), std::move(snapped));

  double best = kInf;
  for (auto k : k_list) {
    const Oscillation osc =
        oscillation_sequence(rx.witness.slopes, rx.witness.weights, snapped_target, k, 0.5 * rx.h * (1.0 + 1e-12));
    const double e = evaluate_sup(w, osc.fn.derivative());
    rep.steps.push_back(LscStep{k, e, osc.distance});
    rep.rate_constant = std::max(rep.rate_constant, static_cast<double>(k) * osc.distance);
    best = std::min(best, e);
  }
  if (best < rep.target_energy - rx.h) rep.verdict = LscVerdict::Violated;
  return rep;
}

}  // namespace suprelax
