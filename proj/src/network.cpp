#include "vsbm/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vsbm {

std::pair<int, int> dyad_from_index(std::int64_t d) {
  int v = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(d))) / 2.0);
  while (static_cast<std::int64_t>(v) * (v - 1) / 2 > d) --v;
  while (static_cast<std::int64_t>(v + 1) * v / 2 <= d) ++v;
  int u = static_cast<int>(d - static_cast<std::int64_t>(v) * (v - 1) / 2);
  return {u, v};
}

ValuedNetwork::ValuedNetwork(int n_) : n(n_), counts(num_dyads(n_), 0) {
  if (n_ < 1) throw std::invalid_argument("ValuedNetwork: need at least one node");
}

std::int64_t ValuedNetwork::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

LabeledNetwork::LabeledNetwork(int n_, int num_labels_)
    : n(n_), num_labels(num_labels_), counts(num_dyads(n_) * num_labels_, 0) {
  if (n_ < 1) throw std::invalid_argument("LabeledNetwork: need at least one node");
  if (num_labels_ < 2) throw std::invalid_argument("LabeledNetwork: need at least two labels");
}

std::int64_t LabeledNetwork::dyad_total(int u, int v) const {
  std::int64_t s = 0;
  for (int l = 0; l < num_labels; ++l) s += at(u, v, l);
  return s;
}

bool LabeledNetwork::constant_total(std::int64_t* value) const {
  const std::int64_t nd = num_dyads(n);
  if (nd == 0) return true;
  std::int64_t first = 0;
  for (int l = 0; l < num_labels; ++l) first += counts[l];
  for (std::int64_t d = 1; d < nd; ++d) {
    std::int64_t s = 0;
    for (int l = 0; l < num_labels; ++l) s += counts[d * num_labels + l];
    if (s != first) return false;
  }
  if (value) *value = first;
  return true;
}

BlockAssignment::BlockAssignment(int k, std::vector<int> labels_)
    : num_blocks(k), labels(std::move(labels_)) {
  if (k < 1) throw std::invalid_argument("BlockAssignment: need at least one block");
  for (int z : labels) {
    if (z < 0 || z >= k)
      throw std::invalid_argument("BlockAssignment: label " + std::to_string(z) +
                                  " outside [0, " + std::to_string(k) + ")");
  }
}

std::int64_t SuffStats::pair_total(int i, int j) const {
  std::int64_t s = 0;
  for (int l = 0; l < num_labels; ++l) s += at(i, j, l);
  return s;
}

BlockSummary block_summary(const BlockAssignment& z) {
  const int k = z.num_blocks;
  BlockSummary s;
  s.num_blocks = k;
  s.sizes.assign(k, 0);
  for (int zu : z.labels) ++s.sizes[zu];
  s.dyad_counts.assign(num_pairs(k), 0);
  for (int i = 0; i < k; ++i) {
    s.dyad_counts[pair_index(i, i)] = s.sizes[i] * (s.sizes[i] - 1) / 2;
    for (int j = i + 1; j < k; ++j) s.dyad_counts[pair_index(i, j)] = s.sizes[i] * s.sizes[j];
  }
  s.has_empty_block = std::any_of(s.sizes.begin(), s.sizes.end(),
                                  [](std::int64_t c) { return c == 0; });
  return s;
}

namespace {

void check_nodes_match(int gn, const BlockAssignment& z, const char* what) {
  if (gn != z.n())
    throw std::invalid_argument(std::string(what) + ": network has " + std::to_string(gn) +
                                " nodes but assignment has " + std::to_string(z.n()));
}

}  // namespace

SuffStats suff_stats(const ValuedNetwork& g, const BlockAssignment& z) {
  check_nodes_match(g.n, z, "suff_stats");
  SuffStats t;
  t.num_blocks = z.num_blocks;
  t.num_labels = 1;
  t.values.assign(num_pairs(z.num_blocks), 0);
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u)
      t.at_ref(z.labels[u], z.labels[v]) += g.counts[dyad_index(u, v)];
  return t;
}

SuffStats suff_stats(const LabeledNetwork& g, const BlockAssignment& z) {
  check_nodes_match(g.n, z, "suff_stats");
  SuffStats t;
  t.num_blocks = z.num_blocks;
  t.num_labels = g.num_labels;
  t.values.assign(static_cast<std::size_t>(num_pairs(z.num_blocks)) * g.num_labels, 0);
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      const std::int64_t d = dyad_index(u, v);
      for (int l = 0; l < g.num_labels; ++l)
        t.at_ref(z.labels[u], z.labels[v], l) += g.counts[d * g.num_labels + l];
    }
  return t;
}

namespace {

// Assignment-problem solver (Hungarian algorithm with potentials).  Returns
// the maximum total of C[a][sigma[a]] over permutations sigma.
std::int64_t max_assignment_value(const std::vector<std::vector<std::int64_t>>& c) {
  const int k = static_cast<int>(c.size());
  if (k == 0) return 0;
  std::int64_t top = 0;
  for (const auto& row : c)
    for (std::int64_t x : row) top = std::max(top, x);

  const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(k + 1, 0), v(k + 1, 0);
  std::vector<int> p(k + 1, 0), way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(k + 1, inf);
    std::vector<char> used(k + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      std::int64_t delta = inf;
      int j1 = -1;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = (top - c[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::int64_t total = 0;
  for (int j = 1; j <= k; ++j) total += c[p[j] - 1][j - 1];
  return total;
}

std::vector<std::vector<std::int64_t>> confusion(const BlockAssignment& za,
                                                 const BlockAssignment& zb) {
  if (za.n() != zb.n())
    throw std::invalid_argument("agreement: assignments cover different node sets");
  if (za.num_blocks != zb.num_blocks)
    throw std::invalid_argument("agreement: assignments have different block counts");
  const int k = za.num_blocks;
  std::vector<std::vector<std::int64_t>> c(k, std::vector<std::int64_t>(k, 0));
  for (int u = 0; u < za.n(); ++u) ++c[za.labels[u]][zb.labels[u]];
  return c;
}

}  // namespace

double agreement(const BlockAssignment& z1, const BlockAssignment& z2) {
  const auto c = confusion(z1, z2);
  const std::int64_t best = max_assignment_value(c);
  return static_cast<double>(best) / static_cast<double>(z1.n());
}

Misclassification misclassification(const BlockAssignment& z_hat, const BlockAssignment& z_true) {
  const auto c = confusion(z_true, z_hat);  // rows: true labels, columns: estimated
  const int k = z_true.num_blocks;
  const std::int64_t best = max_assignment_value(c);

  // fix sigma entry by entry, smallest column first, keeping optimality
  std::vector<int> sigma(k, -1);
  std::vector<char> used(k, false);
  std::int64_t prefix = 0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (used[b]) continue;
      std::vector<std::vector<std::int64_t>> rest;
      rest.reserve(k - a - 1);
      for (int a2 = a + 1; a2 < k; ++a2) {
        std::vector<std::int64_t> row;
        row.reserve(k - a - 1);
        for (int b2 = 0; b2 < k; ++b2)
          if (!used[b2] && b2 != b) row.push_back(c[a2][b2]);
        rest.push_back(std::move(row));
      }
      if (prefix + c[a][b] + max_assignment_value(rest) == best) {
        sigma[a] = b;
        used[b] = true;
        prefix += c[a][b];
        break;
      }
    }
  }
  Misclassification out;
  out.fraction = 1.0 - static_cast<double>(best) / static_cast<double>(z_true.n());
  out.sigma = std::move(sigma);
  return out;
}

BlockAssignment canonicalize(const BlockAssignment& z) {
  std::vector<int> remap(z.num_blocks, -1);
  int next = 0;
  std::vector<int> labels(z.labels.size());
  for (std::size_t u = 0; u < z.labels.size(); ++u) {
    int& r = remap[z.labels[u]];
    if (r < 0) r = next++;
    labels[u] = r;
  }
  return BlockAssignment(std::max(next, 1), std::move(labels));
}

bool has_empty_blocks(const BlockAssignment& z) {
  std::vector<char> seen(z.num_blocks, false);
  for (int zu : z.labels) seen[zu] = true;
  return std::find(seen.begin(), seen.end(), false) != seen.end();
}

std::vector<int> merge_index_map(int k, int a, int b) {
  if (k < 2) throw std::invalid_argument("merge_blocks: need at least two blocks");
  if (a == b || a < 0 || b < 0 || a >= k || b >= k)
    throw std::invalid_argument("merge_blocks: invalid block pair");
  std::vector<int> map(k, -1);
  int next = 0;
  for (int i = 0; i < k; ++i)
    if (i != a && i != b) map[i] = next++;
  map[a] = map[b] = k - 2;
  return map;
}

BlockAssignment merge_blocks(const BlockAssignment& z, int a, int b) {
  const auto map = merge_index_map(z.num_blocks, a, b);
  std::vector<int> labels(z.labels.size());
  for (std::size_t u = 0; u < z.labels.size(); ++u) labels[u] = map[z.labels[u]];
  return BlockAssignment(z.num_blocks - 1, std::move(labels));
}

SuffStats merge_suff_stats(const SuffStats& t, int a, int b) {
  const auto map = merge_index_map(t.num_blocks, a, b);
  SuffStats out;
  out.num_blocks = t.num_blocks - 1;
  out.num_labels = t.num_labels;
  out.values.assign(static_cast<std::size_t>(num_pairs(out.num_blocks)) * t.num_labels, 0);
  for (int i = 0; i < t.num_blocks; ++i)
    for (int j = i; j < t.num_blocks; ++j)
      for (int l = 0; l < t.num_labels; ++l)
        out.at_ref(map[i], map[j], l) += t.at(i, j, l);
  return out;
}

}  // namespace vsbm
