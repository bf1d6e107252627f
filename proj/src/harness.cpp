#include "vsbm/harness.hpp"

#include <cmath>
#include <stdexcept>

#include "vsbm/gof.hpp"
#include "vsbm/markov.hpp"
#include "vsbm/parallel.hpp"

namespace vsbm {

std::vector<ThetaPoisson> builtin_thetas() {
  static const double raw[4][4][4] = {
      {{5.637, 1.607, 3.741, 3.735},
       {1.607, 5.669, 2.942, 1.120},
       {3.741, 2.942, 6.084, 3.232},
       {3.735, 1.120, 3.232, 4.206}},
      {{5.173, 4.938, 5.790, 3.162},
       {4.938, 6.501, 6.232, 4.974},
       {5.790, 6.232, 3.743, 2.556},
       {3.162, 4.974, 2.556, 1.364}},
      {{4.888, 2.707, 1.477, 1.923},
       {2.707, 6.385, 3.898, 1.102},
       {1.477, 3.898, 5.430, 3.299},
       {1.923, 1.102, 3.299, 5.758}},
      {{1.274, 5.378, 5.292, 6.570},
       {5.378, 1.176, 4.530, 6.778},
       {5.292, 4.530, 2.825, 4.350},
       {6.570, 6.778, 4.350, 4.015}}};
  std::vector<ThetaPoisson> out(4);
  for (int r = 0; r < 4; ++r) {
    out[r].num_blocks = 4;
    out[r].rates.assign(num_pairs(4), 0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) out[r].at_ref(i, j) = raw[r][i][j];
  }
  return out;
}

double builtin_pi_decay(int theta_id) {
  if (theta_id < 1 || theta_id > 4)
    throw std::invalid_argument("builtin_pi_decay: theta id must lie in 1..4");
  return theta_id <= 2 ? 1.0 : 0.75;
}

PowerStudyResult power_study(const PowerStudyConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("power_study: need at least one replicate");
  if (cfg.ks.empty()) throw std::invalid_argument("power_study: empty k grid");
  ThetaPoisson theta;
  double decay;
  if (cfg.custom_theta.has_value()) {
    theta = *cfg.custom_theta;
    decay = cfg.pi_decay.value_or(1.0);
  } else {
    theta = builtin_thetas().at(static_cast<std::size_t>(cfg.theta_id) - 1);
    decay = cfg.pi_decay.value_or(builtin_pi_decay(cfg.theta_id));
  }
  const std::vector<double> pi = geometric_weights(decay, theta.num_blocks);
  const std::uint64_t master = cfg.test.chain.seed;

  PowerStudyResult out;
  out.ks = cfg.ks;
  out.alpha = cfg.alpha;
  out.master_seed = master;
  out.rows.resize(static_cast<std::size_t>(cfg.replicates) * cfg.ks.size());

  parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t rep) {
    const std::uint64_t rep_seed = derive_seed(master, kStreamSample + static_cast<std::uint64_t>(rep));
    Rng rng(rep_seed);
    const auto [g, z] = sample_poisson_sbm(cfg.n, pi, theta, rng);
    (void)z;
    for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
      TestOptions opts = cfg.test;
      opts.threads = 1;
      opts.keep_samples = false;
      opts.chain.seed = derive_seed(rep_seed, static_cast<std::uint64_t>(cfg.ks[ki]));
      const TestReport report = test_latent(g, cfg.ks[ki], opts);
      PowerRow row;
      row.replicate = static_cast<int>(rep);
      row.k = cfg.ks[ki];
      row.pvalue = report.pvalue;
      row.reject = report.pvalue <= cfg.alpha;
      row.seed = opts.chain.seed;
      out.rows[static_cast<std::size_t>(rep) * cfg.ks.size() + ki] = row;
    }
  });

  out.rejection_rate.assign(cfg.ks.size(), 0.0);
  for (const PowerRow& row : out.rows) {
    for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki)
      if (row.k == cfg.ks[ki] && row.reject) out.rejection_rate[ki] += 1.0;
  }
  for (double& r : out.rejection_rate) r /= static_cast<double>(cfg.replicates);
  return out;
}

namespace {

double slope_loglog(const std::vector<int>& xs, const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(xs[i]));
    const double y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

ScalingStudyResult scaling_study(const ScalingStudyConfig& cfg) {
  if (cfg.ns.size() < 2) throw std::invalid_argument("scaling_study: need at least two sizes");
  for (const int n : cfg.ns)
    if (n < 6) throw std::invalid_argument("scaling_study: sizes below 6 leave a planted block empty");
  if (cfg.num_blocks != 2) throw std::invalid_argument("scaling_study: planted design uses two blocks");
  if (!(cfg.within > 0.0 && cfg.within < 1.0 && cfg.between > 0.0 && cfg.between < 1.0))
    throw std::invalid_argument("scaling_study: probabilities must lie in (0, 1)");

  ThetaLabeled theta;
  theta.num_blocks = 2;
  theta.num_labels = 2;
  theta.probs.assign(static_cast<std::size_t>(num_pairs(2)) * 2, 0.0);
  theta.at_ref(0, 0, 0) = cfg.within;
  theta.at_ref(0, 0, 1) = 1.0 - cfg.within;
  theta.at_ref(1, 1, 0) = cfg.within;
  theta.at_ref(1, 1, 1) = 1.0 - cfg.within;
  theta.at_ref(0, 1, 0) = cfg.between;
  theta.at_ref(0, 1, 1) = 1.0 - cfg.between;

  ScalingStudyResult out;
  out.ns = cfg.ns;
  out.rows.resize(cfg.ns.size() * static_cast<std::size_t>(cfg.replicates));

  parallel_for(static_cast<std::int64_t>(out.rows.size()), cfg.threads, [&](std::int64_t idx) {
    const std::size_t ni = static_cast<std::size_t>(idx) / cfg.replicates;
    const int rep = static_cast<int>(idx % cfg.replicates);
    const int n = cfg.ns[ni];
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    // a 1:2 planted split keeps node margins distinct across blocks, so the
    // merged fit misfits every node row; balanced halves would give every
    // node the same expected margin and hide the collapse entirely
    std::vector<int> labels(n);
    for (int u = 0; u < n; ++u) labels[u] = u < n / 3 ? 0 : 1;
    const BlockAssignment z(2, std::move(labels));
    LabeledNetwork g(n, 2);
    for (int v = 1; v < n; ++v)
      for (int u = 0; u < v; ++u) {
        const double p0 = theta.at(z.labels[u], z.labels[v], 0);
        if (rng.uniform01() < p0)
          g.at(u, v, 0) = 1;
        else
          g.at(u, v, 1) = 1;
      }

    const BlockSummary summary = block_summary(z);
    const ThetaLabeled theta_hat = mle_labeled(suff_stats(g, z), summary);
    const ThetaLabeled theta_merged = merge_theta(theta_hat, summary, 0, 1);
    const BlockAssignment z_merged = merge_blocks(z, 0, 1);

    FiberChain chain(g, z, GofVariant::BlockCorrectedFullL);
    Rng chain_rng(rng.derive(11));
    for (std::int64_t i = 0; i < cfg.burn_in; ++i) chain.step(chain_rng);
    double true_sum = 0.0, merged_sum = 0.0;
    std::int64_t records = 0;
    for (std::int64_t i = 0; i < cfg.chain_steps; ++i) {
      chain.step(chain_rng);
      if ((i + 1) % cfg.thin == 0) {
        true_sum += chain.gof();
        merged_sum +=
            chi2_bc(chain.labeled_state(), z_merged, theta_merged, GofVariant::BlockCorrectedFullL)
                .value;
        ++records;
      }
    }
    ScalingRow row;
    row.n = n;
    row.replicate = rep;
    row.true_mean = true_sum / static_cast<double>(records);
    row.merged_mean = merged_sum / static_cast<double>(records);
    out.rows[static_cast<std::size_t>(idx)] = row;
  });

  out.true_means.assign(cfg.ns.size(), 0.0);
  out.merged_means.assign(cfg.ns.size(), 0.0);
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      out.true_means[ni] += out.rows[ni * cfg.replicates + rep].true_mean;
      out.merged_means[ni] += out.rows[ni * cfg.replicates + rep].merged_mean;
    }
    out.true_means[ni] /= cfg.replicates;
    out.merged_means[ni] /= cfg.replicates;
  }
  out.slope_true = slope_loglog(cfg.ns, out.true_means);
  out.slope_merged = slope_loglog(cfg.ns, out.merged_means);
  return out;
}

}  // namespace vsbm
