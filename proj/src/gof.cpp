#include "vsbm/gof.hpp"

#include <stdexcept>
#include <vector>

#include "vsbm/model.hpp"

namespace vsbm {

namespace {

void check_testable(const BlockAssignment& z, int gn, int theta_k, const char* what) {
  if (gn != z.n()) throw std::invalid_argument(std::string(what) + ": node count mismatch");
  if (theta_k != z.num_blocks)
    throw std::invalid_argument(std::string(what) + ": theta and assignment disagree on block count");
  if (has_empty_blocks(z)) throw std::invalid_argument(std::string(what) + ": empty block");
}

}  // namespace

GofValue chi2_bc(const ValuedNetwork& g, const BlockAssignment& z, const ThetaPoisson& theta) {
  check_testable(z, g.n, theta.num_blocks, "chi2_bc");
  const int n = g.n;
  const int k = z.num_blocks;
  const BlockSummary summary = block_summary(z);

  std::vector<std::int64_t> m(static_cast<std::size_t>(n) * k, 0);
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) {
      const std::int64_t c = g.counts[dyad_index(u, v)];
      m[static_cast<std::size_t>(u) * k + z.labels[v]] += c;
      m[static_cast<std::size_t>(v) * k + z.labels[u]] += c;
    }

  GofValue out;
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < k; ++i) {
      const std::int64_t peers = summary.size(i) - (z.labels[u] == i ? 1 : 0);
      const double e = static_cast<double>(peers) * theta.at(z.labels[u], i);
      if (e == 0.0) {
        ++out.skipped_cells;
        continue;
      }
      const double d = static_cast<double>(m[static_cast<std::size_t>(u) * k + i]) - e;
      out.value += d * d / e;
      ++out.cells;
    }
  return out;
}

GofValue chi2_bc(const LabeledNetwork& g, const BlockAssignment& z, const ThetaLabeled& theta,
                 GofVariant variant) {
  check_testable(z, g.n, theta.num_blocks, "chi2_bc");
  if (theta.num_labels != g.num_labels)
    throw std::invalid_argument("chi2_bc: theta and network disagree on label count");
  const int n = g.n;
  const int k = z.num_blocks;
  const int L = g.num_labels;
  const int used = variant == GofVariant::BlockCorrectedFullL ? L : L - 1;
  const BlockSummary summary = block_summary(z);

  std::vector<std::int64_t> m(static_cast<std::size_t>(n) * k * L, 0);
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) {
      const std::int64_t d = dyad_index(u, v);
      for (int l = 0; l < L; ++l) {
        const std::int64_t c = g.counts[d * L + l];
        m[(static_cast<std::size_t>(u) * k + z.labels[v]) * L + l] += c;
        m[(static_cast<std::size_t>(v) * k + z.labels[u]) * L + l] += c;
      }
    }

  GofValue out;
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < k; ++i) {
      const std::int64_t peers = summary.size(i) - (z.labels[u] == i ? 1 : 0);
      for (int l = 0; l < used; ++l) {
        const double e = static_cast<double>(peers) * theta.at(z.labels[u], i, l);
        if (e == 0.0) {
          ++out.skipped_cells;
          continue;
        }
        const double d = static_cast<double>(m[(static_cast<std::size_t>(u) * k + i) * L + l]) - e;
        out.value += d * d / e;
        ++out.cells;
      }
    }
  return out;
}

double expected_chi2_on_fiber(const BlockSummary& summary, int num_labels) {
  if (num_labels < 2) throw std::invalid_argument("expected_chi2_on_fiber: need at least two labels");
  const int k = summary.num_blocks;
  for (int i = 0; i < k; ++i) {
    if (summary.size(i) == 0) throw std::domain_error("expected_chi2_on_fiber: empty block");
    if (summary.size(i) == 2)
      throw std::domain_error("expected_chi2_on_fiber: block of size 2 has a single internal dyad");
    for (int j = i + 1; j < k; ++j)
      if (summary.dyads(i, j) == 1)
        throw std::domain_error("expected_chi2_on_fiber: block pair with a single dyad");
  }
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double ni = static_cast<double>(summary.size(i));
    total += ni * (ni - 1.0) / (ni + 1.0);
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double nj = static_cast<double>(summary.size(j));
      if (nj < 2.0) continue;
      total += ni * nj * (nj - 1.0) / (ni * nj - 1.0);
    }
  }
  return (num_labels - 1) * total;
}

double expected_chi2_on_fiber_poisson(const BlockSummary& summary) {
  const int k = summary.num_blocks;
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    if (summary.size(j) == 0) throw std::domain_error("expected_chi2_on_fiber_poisson: empty block");
    const double nj = static_cast<double>(summary.size(j));
    for (int i = 0; i < k; ++i) {
      const double peers = static_cast<double>(summary.size(i) - (i == j ? 1 : 0));
      if (peers == 0.0) continue;
      const double nd = static_cast<double>(summary.dyads(i, j));
      total += nj * (1.0 - peers / nd);
    }
  }
  return total;
}

}  // namespace vsbm
