#pragma once

// Set-level convexification on a slope cloud: separately convex hulls
// (d = 1), the symmetric-diagonal core, maximal Cartesian squares and the
// Cartesian convex hull built from them.

#include <cstddef>
#include <vector>

#include "suprelax/lattice.hpp"

namespace suprelax {

struct HullOptions {
  std::size_t clique_vertex_cap = 64;
  std::size_t square_cap = 100000;
  int threads = 1;
};

/// Family of maximal index sets A with A x A inside a mask. Each A is sorted
/// ascending and the family is in lexicographic order.
struct SquareFamily {
  CloudPtr cloud;
  std::vector<std::vector<std::size_t>> squares;
};

/// Convex polygon (d = 2) or interval (d = 1) stored as its minimal vertex
/// list; counter-clockwise for polygons, ascending for intervals.
struct Polytope {
  std::vector<Point> vertices;
};

/// Union over factors Q of Q x Q.
struct PolytopeProductSet {
  CloudPtr cloud;
  std::vector<Polytope> factors;
};

/// Least separately convex grid set containing `mask`: every row and every
/// column is an index interval. Requires a 1-d cloud.
PairMask separately_convex_hull(const PairMask& mask);

/// Like separately_convex_hull, but starts from `seed`, which must already be
/// a subset of the hull (used for warm starts in level sweeps).
PairMask separately_convex_hull(const PairMask& mask, PairMask seed);

/// Largest symmetric diagonal subset: (i,j) kept iff (i,j), (j,i), (i,i), (j,j) all set.
PairMask hat_subset(const PairMask& mask);

/// Maximal cliques of the graph with vertices {i : (i,i) set} and edges
/// {i,j} with both (i,j) and (j,i) set. Throws Resource past the caps.
SquareFamily maximal_squares(const PairMask& mask, const HullOptions& opts = {});

/// Convex hull of a point set in the cloud dimension (1 or 2).
Polytope convex_hull(std::vector<Point> points, int dim);

/// Euclidean distance from p to the polytope (0 inside).
double distance_to_polytope(const Polytope& poly, const Point& p, int dim);

PolytopeProductSet cartesian_hull(const PairMask& mask, const HullOptions& opts = {});

/// Boundary-inclusive rasterization with tolerance h/2 on the target cloud.
PairMask rasterize(const PolytopeProductSet& set, const CloudPtr& cloud);

/// rasterize(cartesian_hull(mask)) on the mask's own cloud.
PairMask cartesian_hull_mask(const PairMask& mask, const HullOptions& opts = {});

/// True iff the rasterized union of convexified maximal squares is a fixed
/// point of M -> rasterize(cartesian_hull(M)).
bool has_basic_cartesian_convexification(const PairMask& mask, const HullOptions& opts = {});

}  // namespace suprelax
