#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vsbm/moves.hpp"
#include "vsbm/network.hpp"
#include "vsbm/rng.hpp"

namespace vsbm {

enum class Family { Poisson, Labeled };

// Symmetric per-block-pair Poisson rates.
struct ThetaPoisson {
  int num_blocks = 0;
  std::vector<double> rates;  // size num_pairs(k)
  bool has_zero = false;      // some rate is exactly 0

  double at(int i, int j) const { return rates[pair_index(std::min(i, j), std::max(i, j))]; }
  double& at_ref(int i, int j) { return rates[pair_index(std::min(i, j), std::max(i, j))]; }
};

// Symmetric per-block-pair label probabilities (rows sum to 1).
struct ThetaLabeled {
  int num_blocks = 0;
  int num_labels = 0;
  std::vector<double> probs;  // size num_pairs(k) * num_labels
  bool has_boundary = false;  // some probability is exactly 0 or 1

  double at(int i, int j, int l) const {
    return probs[pair_index(std::min(i, j), std::max(i, j)) * num_labels + l];
  }
  double& at_ref(int i, int j, int l) {
    return probs[pair_index(std::min(i, j), std::max(i, j)) * num_labels + l];
  }
};

// theta_ij = t_ij / n_ij.  Pairs touching an empty block have no MLE; that is
// an error.  Pairs with zero dyads (a one-node block's inside) or zero counts
// get a zero estimate, flagged; no statistic cell carries weight on them.
ThetaPoisson mle_poisson(const SuffStats& t, const BlockSummary& summary);

// theta_ij^(l) = t_ij^(l) / sum_l t_ij^(l).  Pairs touching an empty block
// have no MLE; that is an error.  Pairs with zero total get an all-zero row,
// flagged as boundary.
ThetaLabeled mle_labeled(const SuffStats& t, const BlockSummary& summary);

// Censored Bernoulli model as a 3-label network: label 0 observed-present
// (alpha * q_ij), label 1 observed-absent (alpha * (1 - q_ij)), label 2
// unobserved (1 - alpha).  q is a symmetric k x k matrix, row-major.
ThetaLabeled censored_to_labeled(double alpha, const std::vector<double>& q, int k);

// log h(g + move) - log h(g) for the Poisson base measure h(g) = prod 1/g_uv!.
// The move must be feasible (the decremented dyad positive).
double log_base_measure_ratio(const ValuedNetwork& g, const PoissonMove& move);

// Same for the multinomial base measure h(g) = prod N_uv! / prod_l g_uv^(l)!.
double log_base_measure_ratio(const LabeledNetwork& g, const LabeledMove& move);

// Weights proportional to (a, a^2, ..., a^k), normalized.
std::vector<double> geometric_weights(double a, int k);

std::pair<ValuedNetwork, BlockAssignment> sample_poisson_sbm(int n, const std::vector<double>& pi,
                                                             const ThetaPoisson& theta, Rng& rng);

std::pair<LabeledNetwork, BlockAssignment> sample_labeled_sbm(int n, const std::vector<double>& pi,
                                                              const ThetaLabeled& theta,
                                                              std::int64_t dyad_total, Rng& rng);

// Aggregates fitted parameters across a block merge, weighting each absorbed
// pair by its dyad count.  When theta is the MLE this equals the MLE of the
// merged sufficient statistics (for labeled networks: under constant dyad
// totals).  Same index convention as merge_blocks.
ThetaPoisson merge_theta(const ThetaPoisson& theta, const BlockSummary& summary, int a, int b);
ThetaLabeled merge_theta(const ThetaLabeled& theta, const BlockSummary& summary, int a, int b);

}  // namespace vsbm
