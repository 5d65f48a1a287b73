// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuzz_expr.hpp"
#include "suite.hpp"
#include "support.hpp"
#include "suprelax/envelopes.hpp"
#include "suprelax/error.hpp"
#include "suprelax/exprlang.hpp"
#include "suprelax/functionals.hpp"
#include "suprelax/hulls.hpp"
#include "suprelax/oracle.hpp"

using namespace suprelax;
using namespace testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) detail << "first failure: " << what << "; ";
    if (!cond) pass = false;
  }
};

struct BBox {
  std::size_t r0 = SIZE_MAX, r1 = 0, c0 = SIZE_MAX, c1 = 0;
  bool operator==(const BBox&) const = default;
};

BBox bbox(const PairMask& m) {
  BBox b;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.test(i, j)) b = {std::min(b.r0, i), std::max(b.r1, i), std::min(b.c0, j), std::max(b.c1, j)};
  return b;
}

// ------------------------------------------------------------------ 1

void hull_laws(Outcome& o) {
  Rng rng(1);
  const CloudPtr cloud = line_cloud(16, 0.0, 15.0);
  std::size_t violations = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    const PairMask m = trial % 2 ? random_mask(cloud, rng, rng.uniform(0.01, 0.15))
                                 : random_block_mask(cloud, rng, rng.integer(1, 5));
    PairMask bigger = m;
    bigger |= random_mask(cloud, rng, 0.03);
    const PairMask h = separately_convex_hull(m);
    const PairMask hh = separately_convex_hull(h);
    const PairMask hb = separately_convex_hull(bigger);
    const bool ext = m.subset_of(h);
    const bool idem = hh == h;
    const bool mono = h.subset_of(hb);
    const bool box = bbox(h) == bbox(m);
    if (!(ext && idem && mono && box)) {
      ++violations;
      o.require(false, "trial " + std::to_string(trial) + (ext ? "" : " extensivity") + (idem ? "" : " idempotence") +
                           (mono ? "" : " monotonicity") + (box ? "" : " bounding box"));
    }
  }
  const double t = seconds_since(t0);
  o.require(t < 5.0, "runtime " + std::to_string(t) + " s >= 5 s");
  o.detail << "500 masks 16x16, " << violations << " violations, " << t << " s";
}

// ------------------------------------------------------------------ 2

void clique_equivalence(Outcome& o) {
  Rng rng(2);
  std::size_t mismatches = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    CloudPtr cloud;
    switch (trial % 3) {
      case 0: cloud = line_cloud(rng.integer(1, 12), -1.0, 1.0); break;
      case 1: cloud = share(SlopeCloud::uniform(2, rng.integer(1, 3), 0.0, 1.0)); break;
      default: {
        std::vector<Point> pts;
        const int n = rng.integer(1, 12);
        for (int k = 0; k < n; ++k) pts.push_back({static_cast<double>(k), rng.uniform()});
        cloud = share(SlopeCloud::from_points(2, pts));
      }
    }
    PairMask m(cloud);
    const double p = rng.uniform(0.2, 0.9);
    const bool symmetric = rng.coin(0.7);
    for (std::size_t i = 0; i < m.size(); ++i) {
      m.set(i, i, rng.coin(0.85));
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        const bool a = rng.coin(p);
        m.set(i, j, a);
        m.set(j, i, symmetric ? a : rng.coin(p));
      }
    }
    const SquareFamily fam = maximal_squares(m);
    const std::set<std::vector<std::size_t>> got(fam.squares.begin(), fam.squares.end());
    const bool same = got == reference_maximal_squares(m) && got.size() == fam.squares.size();
    if (!same) {
      ++mismatches;
      o.require(false, "trial " + std::to_string(trial));
    }
  }
  const double t = seconds_since(t0);
  o.require(t < 30.0, "runtime " + std::to_string(t) + " s >= 30 s");
  o.detail << "200 masks |P|<=12, " << mismatches << " mismatches, " << t << " s";
}

// ------------------------------------------------------------------ 3

void level_set_identity(Outcome& o) {
  Rng rng(3);
  const CloudPtr cloud = line_cloud(41, -1.0, 1.0);
  std::size_t levels = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const DensityTable v = random_symmetric_diagonal(cloud, rng, rng.uniform(0.0, 1.5), trial % 2 ? 10 : 0);
    const EnvelopeResult env = slc_envelope(v);
    for (double c : v.distinct_values()) {
      ++levels;
      o.require(sublevel(env.table, c) == separately_convex_hull(sublevel(v, c)),
                "table " + std::to_string(trial) + " level " + std::to_string(c));
    }
  }
  o.detail << "20 tables on 41 points, " << levels << " levels compared";
}

// ------------------------------------------------------------------ 4

void hat_laws(Outcome& o) {
  Rng rng(4);
  std::size_t levels = 0;
  std::vector<DensityTable> tables;
  for (int trial = 0; trial < 20; ++trial) {
    const CloudPtr cloud = trial % 4 == 3 ? share(SlopeCloud::uniform(2, 4, -1.0, 1.0))
                                          : line_cloud(rng.integer(2, 30), -2.0, 2.0);
    const DensityTable w = random_table(cloud, rng, rng.integer(2, 8));
    const DensityTable hat = hat_density(w);
    const std::string tag = "table " + std::to_string(trial);
    bool extensive = true;
    for (std::size_t k = 0; k < w.values().size(); ++k) extensive = extensive && hat.values()[k] >= w.values()[k];
    o.require(extensive, tag + " extensive");
    o.require(hat_density(hat) == hat, tag + " idempotent");
    o.require(hat.is_symmetric(), tag + " symmetric");
    o.require(hat.is_diagonal(), tag + " diagonal");
    for (double c : w.distinct_values()) {
      ++levels;
      o.require(sublevel(hat, c) == hat_subset(sublevel(w, c)), tag + " level " + std::to_string(c));
    }
    tables.push_back(w);
  }
  std::size_t fields = 0;
  for (int f = 0; f < 200; ++f) {
    const DensityTable& w = tables[f % tables.size()];
    const SlopeField s = random_field(rng, *w.cloud(), 6);
    ++fields;
    o.require(evaluate_sup(w, s) == evaluate_sup(hat_density(w), s), "field " + std::to_string(f));
  }
  o.detail << "20 tables, " << levels << " levels, " << fields << " fields";
}

// ------------------------------------------------------------------ 5, 6

struct SuiteResults {
  std::vector<NamedDensity> densities;
  std::vector<NamedTarget> targets;
  std::vector<EnvelopeResult> slc;
};

SuiteResults& suite() {
  static SuiteResults s = [] {
    SuiteResults r{suite_densities(), suite_targets(), {}};
    return r;
  }();
  return s;
}

void relaxation(Outcome& o) {
  auto& s = suite();
  std::ostringstream times;
  for (const auto& d : s.densities) {
    const auto t0 = Clock::now();
    EnvelopeResult env = slc_envelope(d.table);
    for (const auto& t : s.targets) {
      const RelaxReport r = relax_oracle(d.table, t.field, env);
      const std::string tag = d.name + " x " + t.name;
      const double h = r.h;
      o.require(std::abs(h - 0.05) < 1e-12, tag + " spacing");
      if (!r.oracle_value || !r.envelope_value) {
        o.require(false, tag + " missing value");
        continue;
      }
      o.require(std::abs(*r.oracle_value - *r.envelope_value) <= 2 * h,
                tag + " gap " + std::to_string(std::abs(*r.oracle_value - *r.envelope_value)));

      double tmin = INFINITY, tmax = -INFINITY;
      for (std::size_t i = 0; i < t.field.size(); ++i) {
        tmin = std::min(tmin, t.field.slope(i)[0]);
        tmax = std::max(tmax, t.field.slope(i)[0]);
      }
      const PairScan scan = reference_pair_scan(d.table, tmin, tmax, h / 2);
      o.require(*r.oracle_value == scan.value, tag + " differs from pair scan");

      RelaxOptions full;
      full.exhaustive = true;
      full.subset_cap = 4;
      const RelaxReport g = relax_oracle(d.table, t.field, env, full);
      o.require(g.oracle_value && *g.oracle_value == *r.oracle_value, tag + " subset search disagrees");
    }
    const double t = seconds_since(t0);
    o.require(t < 60.0, d.name + " runtime " + std::to_string(t) + " s");
    times << d.name << " " << t << " s; ";
    s.slc.push_back(std::move(env));
  }

  // Known values for the double well with zero slope.
  const RelaxReport dw = relax_oracle(s.densities[1].table, s.targets[0].field, s.slc[1]);
  o.require(dw.oracle_value && std::abs(*dw.oracle_value - 0.1) <= 1e-12, "double-well relaxed value 0.1");
  o.require(dw.witness.slopes.size() == 2 && dw.witness.slopes[0][0] == -1.0 && dw.witness.slopes[1][0] == 1.0,
            "double-well witness {-1, 1}");
  o.detail << "5 densities x 4 targets; " << times.str();
}

void reduction(Outcome& o) {
  auto& s = suite();
  HullOptions opts;
  opts.clique_vertex_cap = 128;
  std::size_t compared = 0, skipped = 0;
  std::ostringstream times;
  for (std::size_t k = 0; k < s.densities.size(); ++k) {
    const auto t0 = Clock::now();
    const EnvelopeResult slc = k < s.slc.size() ? s.slc[k] : slc_envelope(s.densities[k].table);
    try {
      const EnvelopeResult xlc = cartesian_lc_envelope(s.densities[k].table, opts);
      ++compared;
      o.require(xlc.table.values().size() == slc.table.values().size() &&
                    std::equal(xlc.table.values().begin(), xlc.table.values().end(), slc.table.values().begin()),
                s.densities[k].name + " envelopes differ");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Domain) {
        o.require(false, s.densities[k].name + ": " + e.what());
      } else {
        ++skipped;
      }
    }
    times << s.densities[k].name << " " << seconds_since(t0) << " s; ";
  }
  o.detail << compared << " densities compared, " << skipped << " skipped by the basic check; " << times.str();
}

// ------------------------------------------------------------------ 7, 8

LscReport& double_well_lsc() {
  static LscReport r = [] {
    const std::vector<std::size_t> ks{2, 4, 8, 16, 32};
    return lsc_experiment(suite().densities[1].table, suite().targets[0].field, ks);
  }();
  return r;
}

void lsc_characterization(Outcome& o) {
  auto& s = suite();
  const std::vector<std::size_t> ks{2, 4, 8, 16};
  std::vector<NamedDensity> slc_members;
  for (std::size_t k = 0; k < s.densities.size(); ++k) {
    const EnvelopeResult env = k < s.slc.size() ? s.slc[k] : slc_envelope(s.densities[k].table);
    if (env.table == s.densities[k].table) slc_members.push_back(s.densities[k]);
    slc_members.push_back({"envelope of " + s.densities[k].name, env.table});
  }
  std::size_t runs = 0;
  for (const auto& d : slc_members)
    for (const auto& t : s.targets) {
      ++runs;
      const LscReport r = lsc_experiment(d.table, t.field, ks);
      o.require(r.verdict == LscVerdict::Consistent, d.name + " x " + t.name + " reported violation");
    }

  const LscReport& dw = double_well_lsc();
  const double h = dw.relax.h;
  double best = INFINITY;
  for (const auto& step : dw.steps) best = std::min(best, step.energy);
  o.require(dw.verdict == LscVerdict::Violated, "double-well verdict");
  o.require(best <= 0.1 + 2 * h, "double-well min J(u_k) = " + std::to_string(best));
  o.require(std::abs(dw.target_energy - 1.0) <= h, "double-well J(u) = " + std::to_string(dw.target_energy));
  o.require(dw.target_energy == reference_energy(s.densities[1].table, s.targets[0].field), "J(u) reference");
  o.detail << runs << " slc runs consistent; double-well: " << verdict_text(dw.verdict) << ", min J(u_k) = " << best
           << ", J(u) = " << dw.target_energy;
}

void recovery_convergence(Outcome& o) {
  const LscReport& dw = double_well_lsc();
  const auto& w = dw.relax.witness;
  const SlopeField& target = dw.relax.target;
  double diam = 0.0;
  for (const auto& p : w.slopes)
    for (const auto& q : w.slopes) diam = std::max(diam, distance(p, q, target.dim()));
  const double len = target.interval().length();
  double previous = INFINITY;
  std::ostringstream dists;
  for (std::size_t k : {2, 4, 8, 16, 32}) {
    const Oscillation osc = oscillation_sequence(w.slopes, w.weights, target, k);
    // Independent check: both antiderivatives are piecewise affine, so the
    // sup of the difference is attained at a knot of either one.
    const PwAffineFn u = antiderivative(target, Point{});
    double sup = 0.0;
    auto probe = [&](double x) {
      const Point a = osc.fn(x), b = u(x);
      sup = std::max(sup, distance(a, b, target.dim()));
    };
    probe(target.interval().a);
    for (const auto& c : osc.fn.derivative().cells()) probe(c.right);
    for (const auto& c : target.cells()) probe(c.right);
    o.require(std::abs(sup - osc.distance) <= 1e-12, "k=" + std::to_string(k) + " distance disagrees with knot scan");
    o.require(osc.distance < previous, "k=" + std::to_string(k) + " not decreasing");
    o.require(osc.distance <= len * diam / (2.0 * k), "k=" + std::to_string(k) + " above bound");
    previous = osc.distance;
    dists << k << ":" << osc.distance << " ";
  }
  o.detail << "diam(A) = " << diam << ", distances " << dists.str();
}

// ------------------------------------------------------------------ 9

void parser_fuzz(Outcome& o) {
  Rng rng(9);
  std::size_t mismatches = 0, undefined = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = rng.integer(1, 2);
    ExprFuzzer fuzz(rng, dim);
    const Expr e = fuzz.make(rng.integer(1, 5));
    const std::string text = fuzz.render(e);
    try {
      const expr::DensityExpr parsed = expr::parse(text);
      const expr::DensityExpr again = expr::parse(expr::print(parsed));
      if (!(again == parsed)) {
        ++mismatches;
        o.require(false, "round trip of '" + text + "'");
      }
      for (int p = 0; p < 100; ++p) {
        std::vector<double> xi(dim), eta(dim);
        for (auto& x : xi) x = rng.uniform(-2.0, 2.0);
        for (auto& x : eta) x = rng.uniform(-2.0, 2.0);
        const auto want = reference_eval(e, xi, eta);
        std::optional<double> got;
        try {
          got = expr::evaluate(parsed, xi, eta);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::Domain) throw;
        }
        if (!want) ++undefined;
        if (want.has_value() != got.has_value() || (want && *want != *got)) {
          ++mismatches;
          o.require(false, "value of '" + text + "'");
        }
      }
    } catch (const Error& err) {
      ++mismatches;
      o.require(false, "'" + text + "': " + err.what());
    }
  }
  o.detail << "200 expressions x 100 points, " << mismatches << " mismatches (" << undefined
           << " undefined points agreed)";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"hull laws", hull_laws},
      {"clique oracle equivalence", clique_equivalence},
      {"level-set identity", level_set_identity},
      {"hat density laws", hat_laws},
      {"relaxation at desk scale", relaxation},
      {"d=1 Cartesian reduction", reduction},
      {"lsc characterization", lsc_characterization},
      {"recovery-sequence convergence", recovery_convergence},
      {"expression parser fuzz", parser_fuzz},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
