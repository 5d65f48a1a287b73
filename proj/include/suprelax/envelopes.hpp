#pragma once

// Envelopes of a density obtained by convexifying its sublevel sets.

#include <cstddef>
#include <vector>

#include "suprelax/hulls.hpp"
#include "suprelax/lattice.hpp"

namespace suprelax {

struct EnvelopeResult {
  DensityTable table;
  /// Distinct input values visited by the sweep, ascending.
  std::vector<double> levels;
  /// Cells whose value went down.
  std::size_t fixups = 0;
};

/// max{W(i,i), W(i,j), W(j,i), W(j,j)}: the symmetric diagonal envelope from above.
DensityTable hat_density(const DensityTable& w);

/// Separately level convex envelope (d = 1). The input must be symmetric and
/// diagonal; otherwise Precondition is thrown and hat_density should be
/// applied first.
EnvelopeResult slc_envelope(const DensityTable& v);

/// Cartesian level convex envelope (d = 1 or 2). Same precondition as
/// slc_envelope; throws Domain naming the level if a swept sublevel set has
/// no basic Cartesian convexification.
EnvelopeResult cartesian_lc_envelope(const DensityTable& w, const HullOptions& opts = {});

}  // namespace suprelax
