#include "suprelax/envelopes.hpp"

#include <algorithm>
#include <string>

#include "suprelax/error.hpp"
#include "suprelax/io.hpp"

namespace suprelax {

namespace {

void require_symmetric_diagonal(const DensityTable& w, const char* op) {
  if (!w.is_symmetric() || !w.is_diagonal())
    fail(ErrorKind::Precondition, std::string(op) +
                                      " requires a symmetric diagonal density; apply hat_density first");
}

// Ascending level sweep: each cell receives the first level whose convexified
// sublevel set covers it. `convexify(level_mask, previous_hull)` returns the
// hull at the current level.
template <class Convexify>
EnvelopeResult level_sweep(const DensityTable& w, Convexify&& convexify) {
  const std::size_t n = w.size();
  const std::vector<double> all_levels = w.distinct_values();
  std::vector<double> out(n * n, 0.0);
  std::vector<std::uint8_t> assigned(n * n, 0);
  std::size_t remaining = n * n;
  std::vector<double> used;
  PairMask hull(w.cloud());

  for (double c : all_levels) {
    if (remaining == 0) break;
    used.push_back(c);
    hull = convexify(sublevel(w, c), std::move(hull), c);
    const auto bits = hull.bits();
    for (std::size_t k = 0; k < bits.size(); ++k) {
      if (bits[k] && !assigned[k]) {
        assigned[k] = 1;
        out[k] = c;
        --remaining;
      }
    }
  }
  if (remaining != 0)
    fail(ErrorKind::Internal, std::to_string(remaining) + " cells not covered by any level of the sweep");

  std::size_t fixups = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k] > w.values()[k])
      fail(ErrorKind::Internal, "envelope exceeds the input at cell " + std::to_string(k));
    if (out[k] < w.values()[k]) ++fixups;
  }
  return EnvelopeResult{DensityTable::with_estimated_coercivity(w.cloud(), std::move(out)), std::move(used), fixups};
}

}  // namespace

DensityTable hat_density(const DensityTable& w) {
  const std::size_t n = w.size();
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = std::max({w(i, i), w(i, j), w(j, i), w(j, j)});
  return DensityTable::with_estimated_coercivity(w.cloud(), std::move(out));
}

EnvelopeResult slc_envelope(const DensityTable& v) {
  if (v.cloud()->dim() != 1)
    fail(ErrorKind::Domain, "slc_envelope is only supported for d = 1 (cloud has d = " +
                                std::to_string(v.cloud()->dim()) + ")");
  require_symmetric_diagonal(v, "slc_envelope");
  return level_sweep(v, [](const PairMask& level, PairMask previous, double) {
    // The previous hull sits inside the current one, so it is a valid seed.
    return separately_convex_hull(level, std::move(previous));
  });
}

EnvelopeResult cartesian_lc_envelope(const DensityTable& w, const HullOptions& opts) {
  const int dim = w.cloud()->dim();
  if (dim < 1 || dim > 2) fail(ErrorKind::Domain, "cartesian_lc_envelope supports d = 1 or 2 only");
  require_symmetric_diagonal(w, "cartesian_lc_envelope");
  return level_sweep(w, [&](const PairMask& level, PairMask previous, double c) {
    PairMask hull = cartesian_hull_mask(level, opts);
    if (!(cartesian_hull_mask(hull, opts) == hull))
      fail(ErrorKind::Domain, "sublevel set at level " + format_real(c) +
                                  " has no basic Cartesian convexification");
    hull |= previous;
    return hull;
  });
}

}  // namespace suprelax
