#pragma once

// Nonlocal supremal functional J(u) = esssup W(u'(x), u'(y)) and related
// evaluations on simple slope fields.

#include <cstddef>
#include <vector>

#include "suprelax/lattice.hpp"

namespace suprelax {

/// Cloud index of every cell slope (snapped within h/2). Throws Domain for
/// slopes farther than that or for a dimension mismatch.
std::vector<std::size_t> snap_slopes(const SlopeField& s, const SlopeCloud& cloud);

/// Sorted distinct cloud indices of the slopes of positive-length cells.
std::vector<std::size_t> active_slopes(const SlopeField& s, const SlopeCloud& cloud);

/// max over ordered pairs of positive-length cells of W(slope_i, slope_j).
double evaluate_sup(const DensityTable& w, const SlopeField& s);

PwAffineFn antiderivative(const SlopeField& s, const Point& base);

/// Every ordered pair of active slopes is in the mask.
bool feasibility(const PairMask& e, const SlopeField& s);

/// Double integral of the indicator chi_K over I x I: 0 when feasible,
/// +infinity otherwise.
double indicator_integral(const PairMask& k, const SlopeField& s);

/// Splits every cell into equal parts so the field has exactly `cells` cells.
/// The first (cells mod m) cells receive one extra part.
SlopeField refine(const SlopeField& s, std::size_t cells);

/// k-cell refinement of `v` with cloud-valued slopes whose pairs stay in `e`.
/// Each slope moves by at most h, so the antiderivatives differ by at most
/// h (b - a) in sup norm. Throws Domain listing the cells that admit no value.
SlopeField simple_approximation(const SlopeField& v, const PairMask& e, std::size_t cells);

/// Exact sup-norm distance between two antiderivatives on the same interval.
double sup_distance(const PwAffineFn& u, const PwAffineFn& v);

}  // namespace suprelax
