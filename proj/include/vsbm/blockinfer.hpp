#pragma once

#include <cstdint>
#include <vector>

#include "vsbm/model.hpp"
#include "vsbm/network.hpp"
#include "vsbm/rng.hpp"

namespace vsbm {

struct VemOptions {
  int max_iters = 500;
  double tol = 1e-6;
  int restarts = 10;
  double param_floor = 1e-8;  // floor on rates/probabilities inside logs
};

// Variational posterior over assignments: per-node membership probabilities
// plus the fitted model.
struct VemFit {
  std::vector<double> tau;  // row-major n x k
  int n = 0;
  int num_blocks = 0;
  Family family = Family::Poisson;
  std::vector<double> pi_hat;
  ThetaPoisson theta_poisson;
  ThetaLabeled theta_labeled;
  double elbo = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> elbo_trace;  // winning restart, one entry per iteration

  double tau_at(int u, int i) const { return tau[static_cast<std::size_t>(u) * num_blocks + i]; }
  BlockAssignment map_assignment() const;
};

// Spectral embedding (top-k eigenvectors of the centered count matrix, scaled
// by eigenvalue magnitude) followed by k-means.
BlockAssignment spectral_init(const ValuedNetwork& g, int k, Rng& rng);
BlockAssignment spectral_init(const LabeledNetwork& g, int k, Rng& rng);

VemFit vem_fit(const ValuedNetwork& g, int k, const VemOptions& opts, Rng& rng);
VemFit vem_fit(const LabeledNetwork& g, int k, const VemOptions& opts, Rng& rng);

struct AssignmentPosterior {
  std::vector<BlockAssignment> support;  // canonicalized, weight-descending
  std::vector<double> weights;           // renormalized, sum to 1
  int raw_support_size = 0;              // distinct assignments before thresholding
};

// Draws assignments from the product of per-node membership probabilities,
// dedupes up to relabeling, and keeps entries with weight >= 1/support size
// (so the modal assignment always survives); weights are renormalized.
AssignmentPosterior posterior_support(const VemFit& fit, int num_draws, Rng& rng);

}  // namespace vsbm
