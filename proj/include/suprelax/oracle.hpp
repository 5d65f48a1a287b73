#pragma once

// Brute-force side of the relaxation theorems: relaxed values by exhaustive
// search over admissible slope sets, explicit oscillating recovery
// sequences, and lower-semicontinuity experiments built from them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suprelax/envelopes.hpp"
#include "suprelax/hulls.hpp"
#include "suprelax/lattice.hpp"

namespace suprelax {

struct RelaxOptions {
  /// Largest admissible slope set searched.
  std::size_t subset_cap = 6;
  /// Run the general subset search even for d = 1 (where pairs suffice).
  bool exhaustive = false;
  HullOptions hull;
};

/// Slope set A used by a recovery sequence and, per target cell, the convex
/// weights that reproduce the cell's slope.
struct Witness {
  std::vector<std::size_t> indices;  // cloud indices, ascending
  std::vector<Point> slopes;
  std::vector<std::vector<double>> weights;  // [cell][slope]
};

struct RelaxReport {
  SlopeField target;
  double h = 0.0;
  /// min over admissible A of max_{a,b in A} W(a,b); empty when no set within
  /// the cap is admissible.
  std::optional<double> oracle_value;
  /// max over target slope pairs of the level convex envelope; empty when the
  /// envelope could not be computed (reason in envelope_note).
  std::optional<double> envelope_value;
  std::string envelope_note;
  Witness witness;
  std::optional<double> gap;
};

/// Requires a symmetric diagonal table. Computes the matching envelope
/// (separately level convex for d = 1, Cartesian for d = 2) internally.
RelaxReport relax_oracle(const DensityTable& w, const SlopeField& target, const RelaxOptions& opts = {});

/// Same, with a precomputed envelope of `w` (reused across many targets).
RelaxReport relax_oracle(const DensityTable& w, const SlopeField& target, const EnvelopeResult& envelope,
                         const RelaxOptions& opts = {});

struct Oscillation {
  PwAffineFn fn;
  /// Sup-norm distance between the antiderivatives of the oscillation and of
  /// the target (both starting from the same base value).
  double distance = 0.0;
};

/// Subdivides every target cell into k blocks, each laid out with the slopes
/// in proportion to that cell's weights. Throws Precondition when weights are
/// negative, do not sum to one, or their mean misses the target slope by more
/// than `tol`.
Oscillation oscillation_sequence(std::span<const Point> slopes, const std::vector<std::vector<double>>& weights,
                                 const SlopeField& target, std::size_t k, double tol = 1e-9,
                                 const Point& base = {});

enum class LscVerdict { Consistent, Violated };

const char* verdict_text(LscVerdict v);

struct LscStep {
  std::size_t k = 0;
  double energy = 0.0;    // J(u_k)
  double distance = 0.0;  // sup |u_k - u|
};

struct LscReport {
  RelaxReport relax;
  double target_energy = 0.0;  // J(u)
  std::vector<LscStep> steps;
  /// max_k k * distance_k: the measured constant C in distance <= C / k.
  double rate_constant = 0.0;
  LscVerdict verdict = LscVerdict::Consistent;
};

/// "lsc violated" when min_k J(u_k) < J(u) - h.
LscReport lsc_experiment(const DensityTable& w, const SlopeField& target, std::span<const std::size_t> k_list,
                         const RelaxOptions& opts = {});

}  // namespace suprelax
