#include "vsbm/testing.hpp"

#include <algorithm>
#include <stdexcept>

#include "vsbm/gof.hpp"
#include "vsbm/parallel.hpp"

namespace vsbm {

namespace {

// Runs one fiber chain with the seed derived for slot `index`.
template <typename Net>
FiberReport run_fiber(const Net& g, const BlockAssignment& z, double weight,
                      const TestOptions& opts, std::uint64_t index) {
  ChainConfig cfg = opts.chain;
  cfg.seed = derive_seed(opts.chain.seed, kStreamFiber + index);
  ChainResult r;
  if constexpr (std::is_same_v<Net, ValuedNetwork>) {
    r = run_chain(g, z, cfg);
  } else {
    r = run_chain(g, z, opts.gof, cfg);
  }
  FiberReport fr;
  fr.assignment = canonicalize(z);
  fr.weight = weight;
  fr.pvalue = r.pvalue;
  fr.observed_gof = r.observed_gof;
  fr.seed = cfg.seed;
  fr.acceptance_rate = r.acceptance_rate;
  fr.gof_autocorr1 = r.gof_autocorr1;
  fr.ess = r.ess;
  fr.skipped_cells = r.skipped_cells;
  fr.singleton_warning = r.singleton_warning;
  if (opts.keep_samples) fr.gof_samples = std::move(r.gof_samples);
  return fr;
}

template <typename Net>
TestReport test_fixed_impl(const Net& g, const BlockAssignment& z, const TestOptions& opts) {
  if (has_empty_blocks(z)) throw std::invalid_argument("test_fixed: empty block");
  TestReport report;
  report.master_seed = opts.chain.seed;
  report.fibers.push_back(run_fiber(g, z, 1.0, opts, 0));
  report.pvalue = report.fibers[0].pvalue;
  report.observed_gof = report.fibers[0].observed_gof;
  if (report.fibers[0].singleton_warning)
    report.warnings.push_back("fiber admits no moves; conditional test is vacuous (p = 1)");
  return report;
}

template <typename Net>
VemFit fit_estimator(const Net& g, int k, const TestOptions& opts) {
  Rng vem_rng = Rng(opts.chain.seed).derive(kStreamVem);
  return vem_fit(g, k, opts.vem, vem_rng);
}

template <typename Net>
TestReport test_plugin_impl(const Net& g, int k, const TestOptions& opts,
                            const std::optional<BlockAssignment>& injected) {
  BlockAssignment z_hat(1, std::vector<int>(g.n, 0));
  EstimatorReport est;
  est.requested_k = k;
  if (injected.has_value()) {
    z_hat = *injected;
    if (z_hat.n() != g.n) throw std::invalid_argument("test_plugin: injected assignment size");
  } else {
    const VemFit fit = fit_estimator(g, k, opts);
    z_hat = fit.map_assignment();
    est.elbo = fit.elbo;
    est.converged = fit.converged;
    est.iterations = fit.iterations;
  }
  const BlockAssignment z_eff = canonicalize(z_hat);
  est.effective_k = z_eff.num_blocks;

  TestReport report;
  report.master_seed = opts.chain.seed;
  report.fibers.push_back(run_fiber(g, z_eff, 1.0, opts, 0));
  report.pvalue = report.fibers[0].pvalue;
  report.observed_gof = report.fibers[0].observed_gof;
  report.estimator = est;
  if (est.effective_k < k)
    report.warnings.push_back("estimator used " + std::to_string(est.effective_k) + " of " +
                              std::to_string(k) + " blocks");
  if (report.fibers[0].singleton_warning)
    report.warnings.push_back("fiber admits no moves; conditional test is vacuous (p = 1)");
  return report;
}

template <typename Net>
TestReport test_latent_impl(const Net& g, int k, const TestOptions& opts) {
  const VemFit fit = fit_estimator(g, k, opts);
  Rng draw_rng = Rng(opts.chain.seed).derive(kStreamPosterior);
  const AssignmentPosterior posterior = posterior_support(fit, opts.posterior_draws, draw_rng);

  TestReport report;
  report.master_seed = opts.chain.seed;
  report.fibers.resize(posterior.support.size());
  parallel_for(static_cast<std::int64_t>(posterior.support.size()), opts.threads,
               [&](std::int64_t j) {
                 report.fibers[j] = run_fiber(g, posterior.support[j], posterior.weights[j], opts,
                                              static_cast<std::uint64_t>(j));
               });

  double pvalue = 0.0;
  for (const FiberReport& fr : report.fibers) pvalue += fr.weight * fr.pvalue;
  report.pvalue = pvalue;
  report.observed_gof = report.fibers[0].observed_gof;

  EstimatorReport est;
  est.elbo = fit.elbo;
  est.converged = fit.converged;
  est.iterations = fit.iterations;
  est.requested_k = k;
  est.effective_k = 0;
  for (const FiberReport& fr : report.fibers)
    est.effective_k = std::max(est.effective_k, fr.assignment.num_blocks);
  est.posterior_raw_size = posterior.raw_support_size;
  report.estimator = est;

  if (est.effective_k < k)
    report.warnings.push_back("posterior support uses at most " + std::to_string(est.effective_k) +
                              " of " + std::to_string(k) + " blocks");
  for (const FiberReport& fr : report.fibers)
    if (fr.singleton_warning) {
      report.warnings.push_back("a support fiber admits no moves; its p-value is 1");
      break;
    }
  return report;
}

template <typename Net>
SelectionReport select_k_impl(const Net& g, const std::vector<int>& ks, double alpha,
                              const TestOptions& opts, bool full_trace) {
  if (ks.empty()) throw std::invalid_argument("select_k: empty candidate list");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("select_k: alpha outside [0, 1]");
  std::vector<int> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  SelectionReport out;
  out.alpha = alpha;
  for (int k : sorted) {
    TestOptions sub = opts;
    sub.chain.seed = derive_seed(opts.chain.seed, kStreamSelect + static_cast<std::uint64_t>(k));
    SelectionEntry entry;
    entry.k = k;
    entry.report = test_latent(g, k, sub);
    const double p = entry.report.pvalue;
    out.trace.push_back(std::move(entry));
    if (!out.selected_k.has_value() && p > alpha) {
      out.selected_k = k;
      if (!full_trace) break;
    }
  }
  return out;
}

template <typename Theta>
double merged_gof_value(const ValuedNetwork& g, const BlockAssignment& z, const Theta& theta,
                        GofVariant, int a, int b, const BlockSummary& summary) {
  return chi2_bc(g, merge_blocks(z, a, b), merge_theta(theta, summary, a, b)).value;
}

template <typename Theta>
double merged_gof_value(const LabeledNetwork& g, const BlockAssignment& z, const Theta& theta,
                        GofVariant variant, int a, int b, const BlockSummary& summary) {
  return chi2_bc(g, merge_blocks(z, a, b), merge_theta(theta, summary, a, b), variant).value;
}

template <typename Net, typename Theta>
std::vector<MergeEntry> merge_diagnostic_impl(const Net& g, const BlockAssignment& z,
                                              const Theta& theta, GofVariant variant) {
  if (has_empty_blocks(z)) throw std::invalid_argument("merge_diagnostic: empty block");
  const int k = z.num_blocks;
  if (k < 2) throw std::invalid_argument("merge_diagnostic: need at least two blocks");
  const BlockSummary summary = block_summary(z);
  double expected;
  if constexpr (std::is_same_v<Net, ValuedNetwork>) {
    expected = expected_chi2_on_fiber_poisson(summary);
  } else {
    expected = expected_chi2_on_fiber(summary, g.num_labels);
  }
  std::vector<MergeEntry> out;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      MergeEntry e;
      e.a = a;
      e.b = b;
      e.merged_gof = merged_gof_value(g, z, theta, variant, a, b, summary);
      e.expected_null = expected;
      e.ratio = e.merged_gof / expected;
      out.push_back(e);
    }
  return out;
}

}  // namespace

TestReport test_fixed(const ValuedNetwork& g, const BlockAssignment& z, const TestOptions& opts) {
  return test_fixed_impl(g, z, opts);
}
TestReport test_fixed(const LabeledNetwork& g, const BlockAssignment& z, const TestOptions& opts) {
  return test_fixed_impl(g, z, opts);
}

TestReport test_plugin(const ValuedNetwork& g, int k, const TestOptions& opts,
                       const std::optional<BlockAssignment>& injected) {
  return test_plugin_impl(g, k, opts, injected);
}
TestReport test_plugin(const LabeledNetwork& g, int k, const TestOptions& opts,
                       const std::optional<BlockAssignment>& injected) {
  return test_plugin_impl(g, k, opts, injected);
}

TestReport test_latent(const ValuedNetwork& g, int k, const TestOptions& opts) {
  return test_latent_impl(g, k, opts);
}
TestReport test_latent(const LabeledNetwork& g, int k, const TestOptions& opts) {
  return test_latent_impl(g, k, opts);
}

SelectionReport select_k(const ValuedNetwork& g, const std::vector<int>& ks, double alpha,
                         const TestOptions& opts, bool full_trace) {
  return select_k_impl(g, ks, alpha, opts, full_trace);
}
SelectionReport select_k(const LabeledNetwork& g, const std::vector<int>& ks, double alpha,
                         const TestOptions& opts, bool full_trace) {
  return select_k_impl(g, ks, alpha, opts, full_trace);
}

std::optional<int> selected_for_alpha(const SelectionReport& trace, double alpha) {
  for (const SelectionEntry& e : trace.trace)
    if (e.report.pvalue > alpha) return e.k;
  return std::nullopt;
}

std::vector<MergeEntry> merge_diagnostic(const ValuedNetwork& g, const BlockAssignment& z,
                                         const ThetaPoisson& theta) {
  return merge_diagnostic_impl(g, z, theta, GofVariant::BlockCorrected);
}
std::vector<MergeEntry> merge_diagnostic(const LabeledNetwork& g, const BlockAssignment& z,
                                         const ThetaLabeled& theta, GofVariant variant) {
  return merge_diagnostic_impl(g, z, theta, variant);
}

}  // namespace vsbm
