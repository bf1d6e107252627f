#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vsbm/model.hpp"
#include "vsbm/testing.hpp"

namespace vsbm {

// The four 4x4 rate matrices used by the built-in simulation studies, and the
// geometric block-weight decay that goes with each.
std::vector<ThetaPoisson> builtin_thetas();
double builtin_pi_decay(int theta_id);  // 1-based id

struct PowerStudyConfig {
  int n = 50;
  int replicates = 50;
  int theta_id = 1;  // 1..4, ignored when custom_theta is set
  std::optional<ThetaPoisson> custom_theta;
  std::optional<double> pi_decay;  // defaults from theta_id
  std::vector<int> ks = {2, 3, 4, 5};
  double alpha = 0.05;
  TestOptions test;  // test.chain.seed is the study master seed
  int threads = 1;
};

struct PowerRow {
  int replicate = 0;
  int k = 0;
  double pvalue = 0.0;
  bool reject = false;  // pvalue <= alpha
  std::uint64_t seed = 0;
};

struct PowerStudyResult {
  std::vector<PowerRow> rows;
  std::vector<int> ks;
  std::vector<double> rejection_rate;  // aligned with ks
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
};

// Replicated latent test over a grid of candidate k on data sampled from a
// built-in (or custom) planted model.
PowerStudyResult power_study(const PowerStudyConfig& cfg);

struct ScalingStudyConfig {
  std::vector<int> ns = {30, 60, 120};
  int replicates = 8;
  int num_blocks = 2;
  double within = 0.8;   // planted probability of label 0 inside blocks
  double between = 0.2;  // and across blocks
  std::int64_t chain_steps = 20000;
  std::int64_t burn_in = 2000;
  std::int64_t thin = 10;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ScalingRow {
  int n = 0;
  int replicate = 0;
  double true_mean = 0.0;    // fiber mean of the statistic at the true assignment
  double merged_mean = 0.0;  // fiber mean evaluated at the merged fit
};

struct ScalingStudyResult {
  std::vector<ScalingRow> rows;
  std::vector<int> ns;
  std::vector<double> true_means;    // per n, averaged over replicates
  std::vector<double> merged_means;
  double slope_true = 0.0;    // log-log least squares
  double slope_merged = 0.0;
};

// Fiber chains on two-block planted labeled data, recording the statistic at
// the true fit and at the merged (single-block) fit along the same chain.
ScalingStudyResult scaling_study(const ScalingStudyConfig& cfg);

}  // namespace vsbm
