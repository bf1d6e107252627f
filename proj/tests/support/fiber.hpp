#pragma once

// Test-only brute-force machinery: exhaustive fiber enumeration and exact
// conditional probabilities, built independently of the sampling code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "vsbm/network.hpp"

namespace vsbm::testsupport {

// all ordered ways to write total as a sum of `parts` nonnegative integers
inline std::vector<std::vector<std::int64_t>> compositions(std::int64_t total, int parts) {
  std::vector<std::vector<std::int64_t>> out;
  if (parts == 0) {
    if (total == 0) out.push_back({});
    return out;
  }
  std::vector<std::int64_t> cur(parts, 0);
  const std::function<void(int, std::int64_t)> rec = [&](int idx, std::int64_t left) {
    if (idx == parts - 1) {
      cur[idx] = left;
      out.push_back(cur);
      return;
    }
    for (std::int64_t c = 0; c <= left; ++c) {
      cur[idx] = c;
      rec(idx + 1, left - c);
    }
  };
  rec(0, total);
  return out;
}

inline std::vector<std::vector<std::int64_t>> dyads_by_pair(const BlockAssignment& z) {
  std::vector<std::vector<std::int64_t>> out(num_pairs(z.num_blocks));
  for (int v = 1; v < z.n(); ++v)
    for (int u = 0; u < v; ++u) {
      const int i = std::min(z.labels[u], z.labels[v]);
      const int j = std::max(z.labels[u], z.labels[v]);
      out[pair_index(i, j)].push_back(dyad_index(u, v));
    }
  return out;
}

// every network sharing g's sufficient statistics under z
inline std::vector<ValuedNetwork> enumerate_fiber(const ValuedNetwork& g,
                                                  const BlockAssignment& z) {
  const SuffStats t = suff_stats(g, z);
  const auto groups = dyads_by_pair(z);
  const int pairs = num_pairs(z.num_blocks);

  std::vector<std::vector<std::vector<std::int64_t>>> options(pairs);
  for (int p = 0; p < pairs; ++p)
    options[p] = compositions(t.values[p], static_cast<int>(groups[p].size()));

  std::vector<ValuedNetwork> fiber;
  ValuedNetwork cur(g.n);
  const std::function<void(int)> rec = [&](int p) {
    if (p == pairs) {
      fiber.push_back(cur);
      return;
    }
    for (const auto& opt : options[p]) {
      for (std::size_t d = 0; d < groups[p].size(); ++d) cur.counts[groups[p][d]] = opt[d];
      rec(p + 1);
    }
  };
  rec(0);
  return fiber;
}

inline std::vector<LabeledNetwork> enumerate_fiber(const LabeledNetwork& g,
                                                   const BlockAssignment& z) {
  const SuffStats t = suff_stats(g, z);
  const auto groups = dyads_by_pair(z);
  const int pairs = num_pairs(z.num_blocks);
  const int L = g.num_labels;

  std::vector<LabeledNetwork> fiber;
  LabeledNetwork cur = g;

  // per pair: assign label splits dyad by dyad against the remaining budget
  std::function<void(int)> rec_pair = [&](int p) {
    if (p == pairs) {
      fiber.push_back(cur);
      return;
    }
    std::vector<std::int64_t> budget(L);
    for (int l = 0; l < L; ++l) budget[l] = t.values[static_cast<std::size_t>(p) * L + l];
    const auto& dyads = groups[p];

    const std::function<void(std::size_t)> rec_dyad = [&](std::size_t di) {
      if (di == dyads.size()) {
        for (int l = 0; l < L; ++l)
          if (budget[l] != 0) return;
        rec_pair(p + 1);
        return;
      }
      std::int64_t total = 0;
      for (int l = 0; l < L; ++l) total += g.counts[dyads[di] * L + l];
      for (const auto& split : compositions(total, L)) {
        bool ok = true;
        for (int l = 0; l < L; ++l)
          if (split[l] > budget[l]) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (int l = 0; l < L; ++l) {
          budget[l] -= split[l];
          cur.counts[dyads[di] * L + l] = split[l];
        }
        rec_dyad(di + 1);
        for (int l = 0; l < L; ++l) budget[l] += split[l];
      }
    };
    rec_dyad(0);
  };
  rec_pair(0);
  return fiber;
}

inline double log_h(const ValuedNetwork& g) {
  double s = 0.0;
  for (std::int64_t c : g.counts) s -= std::lgamma(static_cast<double>(c) + 1.0);
  return s;
}

inline double log_h(const LabeledNetwork& g) {
  double s = 0.0;
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      s += std::lgamma(static_cast<double>(g.dyad_total(u, v)) + 1.0);
      for (int l = 0; l < g.num_labels; ++l)
        s -= std::lgamma(static_cast<double>(g.at(u, v, l)) + 1.0);
    }
  return s;
}

// exact conditional probabilities proportional to the base measure
template <typename Net>
std::vector<double> fiber_probabilities(const std::vector<Net>& fiber) {
  std::vector<double> logs(fiber.size());
  double mx = -1e300;
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    logs[i] = log_h(fiber[i]);
    mx = std::max(mx, logs[i]);
  }
  double total = 0.0;
  for (double& l : logs) {
    l = std::exp(l - mx);
    total += l;
  }
  for (double& l : logs) l /= total;
  return logs;
}

template <typename Net>
std::vector<std::int64_t> encode(const Net& g) {
  return g.counts;
}

// sample mean with a batch-means standard error (guards against chain
// autocorrelation understating the noise)
inline std::pair<double, double> mean_and_batch_se(const std::vector<double>& xs,
                                                   int num_batches = 50) {
  const std::size_t n = xs.size();
  const std::size_t batch = n / static_cast<std::size_t>(num_batches);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);

  std::vector<double> bm;
  for (int b = 0; b < num_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) s += xs[i];
    bm.push_back(s / static_cast<double>(batch));
  }
  double var = 0.0;
  for (double m : bm) var += (m - mean) * (m - mean);
  var /= static_cast<double>(num_batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(num_batches))};
}

}  // namespace vsbm::testsupport
