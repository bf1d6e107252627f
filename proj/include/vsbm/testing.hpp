#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsbm/blockinfer.hpp"
#include "vsbm/markov.hpp"
#include "vsbm/network.hpp"

namespace vsbm {

// Substream ids hung off a master seed; reports record both so any chain can
// be replayed in isolation.
inline constexpr std::uint64_t kStreamVem = 1;
inline constexpr std::uint64_t kStreamPosterior = 2;
inline constexpr std::uint64_t kStreamFiber = 100;
inline constexpr std::uint64_t kStreamSelect = 1000;
inline constexpr std::uint64_t kStreamSample = 5000;

struct TestOptions {
  ChainConfig chain;  // chain.seed is the master seed
  GofVariant gof = GofVariant::BlockCorrected;
  VemOptions vem;
  int posterior_draws = 200;
  int threads = 1;
  bool keep_samples = true;
};

struct FiberReport {
  BlockAssignment assignment;
  double weight = 1.0;
  double pvalue = 0.0;
  double observed_gof = 0.0;
  std::uint64_t seed = 0;
  double acceptance_rate = 0.0;
  double gof_autocorr1 = 0.0;
  double ess = 0.0;
  int skipped_cells = 0;
  bool singleton_warning = false;
  std::vector<double> gof_samples;  // empty when keep_samples is off
};

struct EstimatorReport {
  double elbo = 0.0;
  bool converged = false;
  int iterations = 0;
  int requested_k = 0;
  int effective_k = 0;
  int posterior_raw_size = 0;
};

struct TestReport {
  double pvalue = 0.0;
  double observed_gof = 0.0;  // highest-weight fiber
  std::uint64_t master_seed = 0;
  std::vector<FiberReport> fibers;
  std::optional<EstimatorReport> estimator;
  std::vector<std::string> warnings;
};

// Exact conditional GoF test at a known assignment.
TestReport test_fixed(const ValuedNetwork& g, const BlockAssignment& z, const TestOptions& opts);
TestReport test_fixed(const LabeledNetwork& g, const BlockAssignment& z, const TestOptions& opts);

// Plug-in test: estimate one assignment (or take an injected one), then test
// at it as if fixed.
TestReport test_plugin(const ValuedNetwork& g, int k, const TestOptions& opts,
                       const std::optional<BlockAssignment>& injected = std::nullopt);
TestReport test_plugin(const LabeledNetwork& g, int k, const TestOptions& opts,
                       const std::optional<BlockAssignment>& injected = std::nullopt);

// Partial-Bayes test: weight per-assignment conditional p-values over the
// thresholded posterior support.
TestReport test_latent(const ValuedNetwork& g, int k, const TestOptions& opts);
TestReport test_latent(const LabeledNetwork& g, int k, const TestOptions& opts);

struct SelectionEntry {
  int k = 0;
  TestReport report;
};

struct SelectionReport {
  std::optional<int> selected_k;
  double alpha = 0.05;
  std::vector<SelectionEntry> trace;
};

// Smallest k in ks whose latent test p-value exceeds alpha.  Stops at the
// first pass unless full_trace is set.
SelectionReport select_k(const ValuedNetwork& g, const std::vector<int>& ks, double alpha,
                         const TestOptions& opts, bool full_trace = false);
SelectionReport select_k(const LabeledNetwork& g, const std::vector<int>& ks, double alpha,
                         const TestOptions& opts, bool full_trace = false);

// First k in the trace whose p-value exceeds alpha, for re-reading a recorded
// trace at another level.
std::optional<int> selected_for_alpha(const SelectionReport& trace, double alpha);

struct MergeEntry {
  int a = 0, b = 0;            // merged block pair (0-based)
  double merged_gof = 0.0;     // chi2 at the merged assignment and aggregated theta
  double expected_null = 0.0;  // fiber expectation at the unmerged structure
  double ratio = 0.0;
};

// Evaluates the GoF statistic after every pairwise block merge against the
// order-n fiber expectation of the unmerged structure.  Under a true merge
// the ratio stays bounded; separated blocks push it up with n.
std::vector<MergeEntry> merge_diagnostic(const ValuedNetwork& g, const BlockAssignment& z,
                                         const ThetaPoisson& theta);
std::vector<MergeEntry> merge_diagnostic(const LabeledNetwork& g, const BlockAssignment& z,
                                         const ThetaLabeled& theta, GofVariant variant);

}  // namespace vsbm
