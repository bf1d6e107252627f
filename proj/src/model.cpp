#include "vsbm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vsbm {

namespace {

[[noreturn]] void undefined_mle(int i, int j) {
  throw std::domain_error("undefined MLE for block pair (" + std::to_string(i + 1) + ", " +
                          std::to_string(j + 1) + "): empty block");
}

}  // namespace

ThetaPoisson mle_poisson(const SuffStats& t, const BlockSummary& summary) {
  if (t.num_blocks != summary.num_blocks)
    throw std::invalid_argument("mle_poisson: mismatched block counts");
  if (t.num_labels != 1) throw std::invalid_argument("mle_poisson: labeled statistics passed");
  const int k = t.num_blocks;
  ThetaPoisson theta;
  theta.num_blocks = k;
  theta.rates.assign(num_pairs(k), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      if (summary.size(i) == 0 || summary.size(j) == 0) undefined_mle(i, j);
      const std::int64_t nd = summary.dyads(i, j);
      if (nd == 0) {
        // a one-node block has no internal dyad; the zero estimate is inert
        // because no statistic cell puts weight on this pair
        theta.has_zero = true;
        continue;
      }
      const double est = static_cast<double>(t.at(i, j)) / static_cast<double>(nd);
      theta.at_ref(i, j) = est;
      if (est == 0.0) theta.has_zero = true;
    }
  return theta;
}

ThetaLabeled mle_labeled(const SuffStats& t, const BlockSummary& summary) {
  if (t.num_blocks != summary.num_blocks)
    throw std::invalid_argument("mle_labeled: mismatched block counts");
  if (t.num_labels < 2) throw std::invalid_argument("mle_labeled: need at least two labels");
  const int k = t.num_blocks;
  const int L = t.num_labels;
  ThetaLabeled theta;
  theta.num_blocks = k;
  theta.num_labels = L;
  theta.probs.assign(static_cast<std::size_t>(num_pairs(k)) * L, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      if (summary.size(i) == 0 || summary.size(j) == 0) undefined_mle(i, j);
      const std::int64_t total = t.pair_total(i, j);
      if (total == 0) {
        theta.has_boundary = true;
        continue;
      }
      for (int l = 0; l < L; ++l) {
        const double est = static_cast<double>(t.at(i, j, l)) / static_cast<double>(total);
        theta.at_ref(i, j, l) = est;
        if (est == 0.0 || est == 1.0) theta.has_boundary = true;
      }
    }
  return theta;
}

ThetaLabeled censored_to_labeled(double alpha, const std::vector<double>& q, int k) {
  if (k < 1) throw std::invalid_argument("censored_to_labeled: need at least one block");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("censored_to_labeled: alpha must lie in (0, 1]");
  if (q.size() != static_cast<std::size_t>(k) * k)
    throw std::invalid_argument("censored_to_labeled: q must be a k x k matrix");
  ThetaLabeled theta;
  theta.num_blocks = k;
  theta.num_labels = 3;
  theta.probs.assign(static_cast<std::size_t>(num_pairs(k)) * 3, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const double qij = q[static_cast<std::size_t>(i) * k + j];
      const double qji = q[static_cast<std::size_t>(j) * k + i];
      if (qij != qji) throw std::invalid_argument("censored_to_labeled: q must be symmetric");
      if (!(qij > 0.0) || !(qij < 1.0))
        throw std::invalid_argument("censored_to_labeled: q entries must lie in (0, 1)");
      theta.at_ref(i, j, 0) = alpha * qij;
      theta.at_ref(i, j, 1) = alpha * (1.0 - qij);
      theta.at_ref(i, j, 2) = 1.0 - alpha;
    }
  if (alpha == 1.0) theta.has_boundary = true;
  return theta;
}

double log_base_measure_ratio(const ValuedNetwork& g, const PoissonMove& move) {
  const std::int64_t down = g.at(move.sub[0], move.sub[1]);
  if (down < 1) throw std::domain_error("log_base_measure_ratio: infeasible move");
  const std::int64_t up = g.at(move.add[0], move.add[1]);
  return std::log(static_cast<double>(down)) - std::log(static_cast<double>(up + 1));
}

double log_base_measure_ratio(const LabeledNetwork& g, const LabeledMove& move) {
  const std::int64_t d1_from = g.at(move.d1[0], move.d1[1], move.label_from);
  const std::int64_t d2_to = g.at(move.d2[0], move.d2[1], move.label_to);
  if (d1_from < 1 || d2_to < 1) throw std::domain_error("log_base_measure_ratio: infeasible move");
  const std::int64_t d1_to = g.at(move.d1[0], move.d1[1], move.label_to);
  const std::int64_t d2_from = g.at(move.d2[0], move.d2[1], move.label_from);
  return std::log(static_cast<double>(d1_from)) + std::log(static_cast<double>(d2_to)) -
         std::log(static_cast<double>(d1_to + 1)) - std::log(static_cast<double>(d2_from + 1));
}

std::vector<double> geometric_weights(double a, int k) {
  if (!(a > 0.0)) throw std::invalid_argument("geometric_weights: a must be positive");
  if (k < 1) throw std::invalid_argument("geometric_weights: need at least one block");
  std::vector<double> w(k);
  double cur = 1.0, total = 0.0;
  for (int i = 0; i < k; ++i) {
    cur *= a;
    w[i] = cur;
    total += cur;
  }
  for (double& x : w) x /= total;
  return w;
}

namespace {

BlockAssignment sample_assignment(int n, const std::vector<double>& pi, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: need at least one node");
  if (pi.empty()) throw std::invalid_argument("sample: empty block weights");
  std::vector<int> labels(n);
  for (int u = 0; u < n; ++u) labels[u] = rng.categorical(pi);
  return BlockAssignment(static_cast<int>(pi.size()), std::move(labels));
}

}  // namespace

std::pair<ValuedNetwork, BlockAssignment> sample_poisson_sbm(int n, const std::vector<double>& pi,
                                                             const ThetaPoisson& theta, Rng& rng) {
  if (static_cast<int>(pi.size()) != theta.num_blocks)
    throw std::invalid_argument("sample_poisson_sbm: pi and theta disagree on block count");
  for (double r : theta.rates)
    if (!(r >= 0.0)) throw std::invalid_argument("sample_poisson_sbm: negative rate");
  BlockAssignment z = sample_assignment(n, pi, rng);
  ValuedNetwork g(n);
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u)
      g.counts[dyad_index(u, v)] = rng.poisson(theta.at(z.labels[u], z.labels[v]));
  return {std::move(g), std::move(z)};
}

std::pair<LabeledNetwork, BlockAssignment> sample_labeled_sbm(int n, const std::vector<double>& pi,
                                                              const ThetaLabeled& theta,
                                                              std::int64_t dyad_total, Rng& rng) {
  if (static_cast<int>(pi.size()) != theta.num_blocks)
    throw std::invalid_argument("sample_labeled_sbm: pi and theta disagree on block count");
  if (dyad_total < 1) throw std::invalid_argument("sample_labeled_sbm: dyad total must be positive");
  BlockAssignment z = sample_assignment(n, pi, rng);
  LabeledNetwork g(n, theta.num_labels);
  std::vector<double> row(theta.num_labels);
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) {
      for (int l = 0; l < theta.num_labels; ++l) row[l] = theta.at(z.labels[u], z.labels[v], l);
      for (std::int64_t s = 0; s < dyad_total; ++s) ++g.at(u, v, rng.categorical(row));
    }
  return {std::move(g), std::move(z)};
}

ThetaPoisson merge_theta(const ThetaPoisson& theta, const BlockSummary& summary, int a, int b) {
  const int k = theta.num_blocks;
  if (summary.num_blocks != k) throw std::invalid_argument("merge_theta: mismatched block counts");
  const auto map = merge_index_map(k, a, b);
  ThetaPoisson out;
  out.num_blocks = k - 1;
  out.rates.assign(num_pairs(k - 1), 0.0);
  std::vector<double> weight(num_pairs(k - 1), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const double nd = static_cast<double>(summary.dyads(i, j));
      const int p = pair_index(std::min(map[i], map[j]), std::max(map[i], map[j]));
      out.rates[p] += nd * theta.at(i, j);
      weight[p] += nd;
    }
  for (int p = 0; p < num_pairs(k - 1); ++p) {
    if (weight[p] == 0.0) throw std::domain_error("merge_theta: merged pair has no dyads");
    out.rates[p] /= weight[p];
    if (out.rates[p] == 0.0) out.has_zero = true;
  }
  return out;
}

ThetaLabeled merge_theta(const ThetaLabeled& theta, const BlockSummary& summary, int a, int b) {
  const int k = theta.num_blocks;
  if (summary.num_blocks != k) throw std::invalid_argument("merge_theta: mismatched block counts");
  const auto map = merge_index_map(k, a, b);
  const int L = theta.num_labels;
  ThetaLabeled out;
  out.num_blocks = k - 1;
  out.num_labels = L;
  out.probs.assign(static_cast<std::size_t>(num_pairs(k - 1)) * L, 0.0);
  std::vector<double> weight(num_pairs(k - 1), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const double nd = static_cast<double>(summary.dyads(i, j));
      const int p = pair_index(std::min(map[i], map[j]), std::max(map[i], map[j]));
      for (int l = 0; l < L; ++l) out.probs[static_cast<std::size_t>(p) * L + l] += nd * theta.at(i, j, l);
      weight[p] += nd;
    }
  for (int p = 0; p < num_pairs(k - 1); ++p) {
    if (weight[p] == 0.0) throw std::domain_error("merge_theta: merged pair has no dyads");
    for (int l = 0; l < L; ++l) {
      double& x = out.probs[static_cast<std::size_t>(p) * L + l];
      x /= weight[p];
      if (x == 0.0 || x == 1.0) out.has_boundary = true;
    }
  }
  return out;
}

}  // namespace vsbm
