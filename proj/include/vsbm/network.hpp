#pragma once

#include <cstdint>
#include <vector>

namespace vsbm {

// Index of the unordered dyad {u, v}, u < v, in the flattened lower triangle.
// Independent of n, so dyads enumerate as (0,1), (0,2), (1,2), (0,3), ...
inline std::int64_t dyad_index(int u, int v) {
  return static_cast<std::int64_t>(v) * (v - 1) / 2 + u;
}

inline std::int64_t num_dyads(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

// Inverse of dyad_index.
std::pair<int, int> dyad_from_index(std::int64_t d);

// Index of the unordered block pair {i, j}, i <= j.
inline int pair_index(int i, int j) { return j * (j + 1) / 2 + i; }

inline int num_pairs(int k) { return k * (k + 1) / 2; }

// Undirected loopless network with integer dyad counts.
struct ValuedNetwork {
  int n = 0;
  std::vector<std::int64_t> counts;  // size num_dyads(n), dyad_index order

  ValuedNetwork() = default;
  explicit ValuedNetwork(int n_);

  std::int64_t at(int u, int v) const { return counts[dyad_index(std::min(u, v), std::max(u, v))]; }
  std::int64_t& at(int u, int v) { return counts[dyad_index(std::min(u, v), std::max(u, v))]; }
  std::int64_t total() const;

  bool operator==(const ValuedNetwork&) const = default;
};

// Undirected loopless network whose dyads carry counts over num_labels
// categories; label counts on a dyad sum to that dyad's total.
struct LabeledNetwork {
  int n = 0;
  int num_labels = 0;
  std::vector<std::int64_t> counts;  // size num_dyads(n) * num_labels

  LabeledNetwork() = default;
  LabeledNetwork(int n_, int num_labels_);

  std::int64_t at(int u, int v, int l) const {
    return counts[dyad_index(std::min(u, v), std::max(u, v)) * num_labels + l];
  }
  std::int64_t& at(int u, int v, int l) {
    return counts[dyad_index(std::min(u, v), std::max(u, v)) * num_labels + l];
  }
  std::int64_t dyad_total(int u, int v) const;
  // true when every dyad has the same total
  bool constant_total(std::int64_t* value = nullptr) const;

  bool operator==(const LabeledNetwork&) const = default;
};

// Node-to-block map with blocks 0..k-1.
struct BlockAssignment {
  int num_blocks = 0;
  std::vector<int> labels;  // size n, entries in [0, num_blocks)

  BlockAssignment() = default;
  BlockAssignment(int k, std::vector<int> labels_);

  int n() const { return static_cast<int>(labels.size()); }

  bool operator==(const BlockAssignment&) const = default;
};

// Block sizes and dyad counts per block pair.
struct BlockSummary {
  int num_blocks = 0;
  std::vector<std::int64_t> sizes;        // n_i
  std::vector<std::int64_t> dyad_counts;  // n_ij, pair_index order
  bool has_empty_block = false;

  std::int64_t size(int i) const { return sizes[i]; }
  std::int64_t dyads(int i, int j) const { return dyad_counts[pair_index(std::min(i, j), std::max(i, j))]; }
};

// Sufficient statistics: per block pair, summed dyad counts (num_labels = 1
// for plain valued networks, per-label sums otherwise).
struct SuffStats {
  int num_blocks = 0;
  int num_labels = 1;
  std::vector<std::int64_t> values;  // size num_pairs(k) * num_labels

  std::int64_t at(int i, int j, int l = 0) const {
    return values[pair_index(std::min(i, j), std::max(i, j)) * num_labels + l];
  }
  std::int64_t& at_ref(int i, int j, int l = 0) {
    return values[pair_index(std::min(i, j), std::max(i, j)) * num_labels + l];
  }
  std::int64_t pair_total(int i, int j) const;

  bool operator==(const SuffStats&) const = default;
};

BlockSummary block_summary(const BlockAssignment& z);

SuffStats suff_stats(const ValuedNetwork& g, const BlockAssignment& z);
SuffStats suff_stats(const LabeledNetwork& g, const BlockAssignment& z);

// Fraction of nodes matched under the best label permutation of z1.
double agreement(const BlockAssignment& z1, const BlockAssignment& z2);

struct Misclassification {
  double fraction;         // 1 - agreement
  std::vector<int> sigma;  // optimal relabeling of z_true, lexicographically least
};

// Misclassification of z_hat against z_true, with the permutation realizing it.
Misclassification misclassification(const BlockAssignment& z_hat, const BlockAssignment& z_true);

// Relabels blocks in order of first occurrence and drops unused labels.
BlockAssignment canonicalize(const BlockAssignment& z);

bool has_empty_blocks(const BlockAssignment& z);

// Merges blocks a and b (0-based).  The merged block takes index k-2 in the
// result; all other blocks keep their relative order.
BlockAssignment merge_blocks(const BlockAssignment& z, int a, int b);

// Old-to-new block index map used by merge_blocks.
std::vector<int> merge_index_map(int k, int a, int b);

SuffStats merge_suff_stats(const SuffStats& t, int a, int b);

}  // namespace vsbm
