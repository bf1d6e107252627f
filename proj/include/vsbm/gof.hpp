#pragma once

#include <cstdint>

#include "vsbm/network.hpp"

namespace vsbm {

struct ThetaPoisson;
struct ThetaLabeled;

// Which labels enter the labeled chi-square: all but the last (the last label
// acts as reference category), or every label.
enum class GofVariant { BlockCorrected, BlockCorrectedFullL };

struct GofValue {
  double value = 0.0;
  int cells = 0;          // cells contributing to the sum
  int skipped_cells = 0;  // cells with zero expectation, left out
};

// Block-corrected chi-square: for each node u and block i, compares the sum
// of u's counts toward block i against its expectation (n_i minus one if u
// sits in block i) times theta.
GofValue chi2_bc(const ValuedNetwork& g, const BlockAssignment& z, const ThetaPoisson& theta);
GofValue chi2_bc(const LabeledNetwork& g, const BlockAssignment& z, const ThetaLabeled& theta,
                 GofVariant variant);

// Exact conditional expectation of the full-label labeled statistic on a
// fiber with the given block structure (single-draw dyads).  Valid when no
// estimate sits on the boundary.
double expected_chi2_on_fiber(const BlockSummary& summary, int num_labels);

// Poisson analog: per-cell expectation 1 - (n_i - delta)/n_ij from the
// conditional multinomial law of counts within a block pair.
double expected_chi2_on_fiber_poisson(const BlockSummary& summary);

}  // namespace vsbm
