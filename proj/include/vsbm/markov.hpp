#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "vsbm/gof.hpp"
#include "vsbm/model.hpp"
#include "vsbm/moves.hpp"
#include "vsbm/network.hpp"
#include "vsbm/rng.hpp"

namespace vsbm {

struct ChainConfig {
  std::int64_t num_graphs = 1000;
  std::uint64_t seed = 0;
  std::int64_t thinning = 1;
  std::int64_t burn_in = 0;
};

// Dyad proposal table for one block assignment.  Proposals draw a block pair
// uniformly among pairs with at least two dyads, then two distinct dyads
// within it (and for labeled networks, two distinct labels).
class MoveProposer {
 public:
  MoveProposer(const BlockAssignment& z, const BlockSummary& summary);

  bool has_eligible_pair() const { return !pairs_.empty(); }
  PoissonMove propose_poisson(Rng& rng) const;
  LabeledMove propose_labeled(int num_labels, Rng& rng) const;

 private:
  struct EligiblePair {
    int i, j;
    std::int64_t ndyads;
  };
  std::pair<std::array<int, 2>, std::array<int, 2>> draw_dyads(const EligiblePair& p,
                                                               Rng& rng) const;
  std::array<int, 2> unrank_dyad(const EligiblePair& p, std::int64_t r) const;

  std::vector<std::vector<int>> members_;
  std::vector<EligiblePair> pairs_;
};

bool is_feasible(const ValuedNetwork& g, const PoissonMove& move);
bool is_feasible(const LabeledNetwork& g, const LabeledMove& move);

void apply_move(ValuedNetwork& g, const PoissonMove& move);
void apply_move(LabeledNetwork& g, const LabeledMove& move);

// Metropolis chain over the fiber of g given z, tracking the block-corrected
// chi-square statistic incrementally.  The assignment is canonicalized on
// construction, so chains for relabel-equivalent assignments are identical.
class FiberChain {
 public:
  FiberChain(const ValuedNetwork& g, const BlockAssignment& z);
  FiberChain(const LabeledNetwork& g, const BlockAssignment& z, GofVariant variant);

  // One Metropolis step; returns true if the proposal was accepted.  No-op
  // when the fiber admits no moves.
  bool step(Rng& rng);

  bool degenerate() const { return !proposer_->has_eligible_pair(); }
  double gof() const { return chi2_; }
  int skipped_cells() const { return skipped_; }
  const BlockAssignment& assignment() const { return z_; }
  const ValuedNetwork& valued_state() const { return gp_; }
  const LabeledNetwork& labeled_state() const { return gl_; }
  // full recomputation, for drift checks
  double gof_recomputed() const;

 private:
  void init_cells();
  double cell(int u, int i, int l) const;
  void update_cell(int u, int i, int l, std::int64_t delta);

  Family family_;
  GofVariant variant_ = GofVariant::BlockCorrected;
  ValuedNetwork gp_;
  LabeledNetwork gl_;
  BlockAssignment z_;
  BlockSummary summary_;
  ThetaPoisson theta_p_;
  ThetaLabeled theta_l_;
  std::unique_ptr<MoveProposer> proposer_;
  int gof_labels_ = 1;              // labels entering the statistic
  std::vector<std::int64_t> m_;     // per (node, block, label) observed sums
  std::vector<double> e_;           // matching expected values
  double chi2_ = 0.0;
  int skipped_ = 0;
};

struct ChainResult {
  double pvalue = 0.0;
  double observed_gof = 0.0;
  std::vector<double> gof_samples;
  double acceptance_rate = 0.0;
  double gof_autocorr1 = 0.0;  // lag-1 autocorrelation of the recorded GoF
  double ess = 0.0;            // AR(1)-based effective sample size
  int skipped_cells = 0;
  bool singleton_warning = false;  // fiber admits no moves
};

// Samples the fiber conditional distribution starting from g and returns the
// exact conditional p-value estimate: the fraction of sampled graphs whose
// GoF statistic is at least the observed one (ties reject).
ChainResult run_chain(const ValuedNetwork& g, const BlockAssignment& z, const ChainConfig& cfg);
ChainResult run_chain(const LabeledNetwork& g, const BlockAssignment& z, GofVariant variant,
                      const ChainConfig& cfg);

}  // namespace vsbm
