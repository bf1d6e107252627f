#include "vsbm/markov.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace vsbm {

MoveProposer::MoveProposer(const BlockAssignment& z, const BlockSummary& summary) {
  const int k = z.num_blocks;
  members_.assign(k, {});
  for (int u = 0; u < z.n(); ++u) members_[z.labels[u]].push_back(u);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const std::int64_t nd = summary.dyads(i, j);
      if (nd >= 2) pairs_.push_back({i, j, nd});
    }
}

std::array<int, 2> MoveProposer::unrank_dyad(const EligiblePair& p, std::int64_t r) const {
  int u, v;
  if (p.i == p.j) {
    const auto [a, b] = dyad_from_index(r);
    u = members_[p.i][a];
    v = members_[p.i][b];
  } else {
    const std::int64_t nj = static_cast<std::int64_t>(members_[p.j].size());
    u = members_[p.i][static_cast<std::size_t>(r / nj)];
    v = members_[p.j][static_cast<std::size_t>(r % nj)];
  }
  if (u > v) std::swap(u, v);
  return {u, v};
}

std::pair<std::array<int, 2>, std::array<int, 2>> MoveProposer::draw_dyads(const EligiblePair& p,
                                                                            Rng& rng) const {
  const std::int64_t r1 = rng.uniform_int(p.ndyads);
  std::int64_t r2 = rng.uniform_int(p.ndyads - 1);
  if (r2 >= r1) ++r2;
  return {unrank_dyad(p, r1), unrank_dyad(p, r2)};
}

PoissonMove MoveProposer::propose_poisson(Rng& rng) const {
  if (pairs_.empty()) throw std::logic_error("propose_poisson: no eligible block pair");
  const EligiblePair& p = pairs_[static_cast<std::size_t>(rng.uniform_int(pairs_.size()))];
  const auto [d1, d2] = draw_dyads(p, rng);
  return {d1, d2};
}

LabeledMove MoveProposer::propose_labeled(int num_labels, Rng& rng) const {
  if (pairs_.empty()) throw std::logic_error("propose_labeled: no eligible block pair");
  if (num_labels < 2) throw std::invalid_argument("propose_labeled: need at least two labels");
  const EligiblePair& p = pairs_[static_cast<std::size_t>(rng.uniform_int(pairs_.size()))];
  const auto [d1, d2] = draw_dyads(p, rng);
  const int to = static_cast<int>(rng.uniform_int(num_labels));
  int from = static_cast<int>(rng.uniform_int(num_labels - 1));
  if (from >= to) ++from;
  return {d1, d2, to, from};
}

bool is_feasible(const ValuedNetwork& g, const PoissonMove& move) {
  return g.at(move.sub[0], move.sub[1]) >= 1;
}

bool is_feasible(const LabeledNetwork& g, const LabeledMove& move) {
  return g.at(move.d1[0], move.d1[1], move.label_from) >= 1 &&
         g.at(move.d2[0], move.d2[1], move.label_to) >= 1;
}

void apply_move(ValuedNetwork& g, const PoissonMove& move) {
  std::int64_t& down = g.at(move.sub[0], move.sub[1]);
  assert(down >= 1);
  --down;
  ++g.at(move.add[0], move.add[1]);
}

void apply_move(LabeledNetwork& g, const LabeledMove& move) {
  std::int64_t& d1_from = g.at(move.d1[0], move.d1[1], move.label_from);
  std::int64_t& d2_to = g.at(move.d2[0], move.d2[1], move.label_to);
  assert(d1_from >= 1 && d2_to >= 1);
  --d1_from;
  --d2_to;
  ++g.at(move.d1[0], move.d1[1], move.label_to);
  ++g.at(move.d2[0], move.d2[1], move.label_from);
}

FiberChain::FiberChain(const ValuedNetwork& g, const BlockAssignment& z)
    : family_(Family::Poisson), gp_(g), z_(canonicalize(z)) {
  if (g.n != z.n()) throw std::invalid_argument("FiberChain: node count mismatch");
  summary_ = block_summary(z_);
  theta_p_ = mle_poisson(suff_stats(gp_, z_), summary_);
  proposer_ = std::make_unique<MoveProposer>(z_, summary_);
  gof_labels_ = 1;
  init_cells();
}

FiberChain::FiberChain(const LabeledNetwork& g, const BlockAssignment& z, GofVariant variant)
    : family_(Family::Labeled), variant_(variant), gl_(g), z_(canonicalize(z)) {
  if (g.n != z.n()) throw std::invalid_argument("FiberChain: node count mismatch");
  summary_ = block_summary(z_);
  theta_l_ = mle_labeled(suff_stats(gl_, z_), summary_);
  proposer_ = std::make_unique<MoveProposer>(z_, summary_);
  gof_labels_ = variant == GofVariant::BlockCorrectedFullL ? g.num_labels : g.num_labels - 1;
  init_cells();
}

void FiberChain::init_cells() {
  const int n = z_.n();
  const int k = z_.num_blocks;
  const int L = family_ == Family::Poisson ? 1 : gl_.num_labels;
  m_.assign(static_cast<std::size_t>(n) * k * L, 0);
  e_.assign(static_cast<std::size_t>(n) * k * L, 0.0);

  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) {
      if (family_ == Family::Poisson) {
        const std::int64_t c = gp_.counts[dyad_index(u, v)];
        m_[static_cast<std::size_t>(u) * k + z_.labels[v]] += c;
        m_[static_cast<std::size_t>(v) * k + z_.labels[u]] += c;
      } else {
        const std::int64_t d = dyad_index(u, v);
        for (int l = 0; l < L; ++l) {
          const std::int64_t c = gl_.counts[d * L + l];
          m_[(static_cast<std::size_t>(u) * k + z_.labels[v]) * L + l] += c;
          m_[(static_cast<std::size_t>(v) * k + z_.labels[u]) * L + l] += c;
        }
      }
    }

  chi2_ = 0.0;
  skipped_ = 0;
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < k; ++i) {
      const std::int64_t peers = summary_.size(i) - (z_.labels[u] == i ? 1 : 0);
      for (int l = 0; l < gof_labels_; ++l) {
        const double rate = family_ == Family::Poisson ? theta_p_.at(z_.labels[u], i)
                                                       : theta_l_.at(z_.labels[u], i, l);
        const double e = static_cast<double>(peers) * rate;
        e_[(static_cast<std::size_t>(u) * k + i) * L + l] = e;
        if (e == 0.0)
          ++skipped_;
        else
          chi2_ += cell(u, i, l);
      }
    }
}

double FiberChain::cell(int u, int i, int l) const {
  const int k = z_.num_blocks;
  const int L = family_ == Family::Poisson ? 1 : gl_.num_labels;
  const std::size_t idx = (static_cast<std::size_t>(u) * k + i) * L + l;
  const double e = e_[idx];
  if (e == 0.0) return 0.0;
  const double d = static_cast<double>(m_[idx]) - e;
  return d * d / e;
}

void FiberChain::update_cell(int u, int i, int l, std::int64_t delta) {
  if (l >= gof_labels_) {
    const int k = z_.num_blocks;
    const int L = gl_.num_labels;
    m_[(static_cast<std::size_t>(u) * k + i) * L + l] += delta;
    return;
  }
  const int k = z_.num_blocks;
  const int L = family_ == Family::Poisson ? 1 : gl_.num_labels;
  const std::size_t idx = (static_cast<std::size_t>(u) * k + i) * L + l;
  chi2_ -= cell(u, i, l);
  m_[idx] += delta;
  chi2_ += cell(u, i, l);
}

double FiberChain::gof_recomputed() const {
  if (family_ == Family::Poisson) return chi2_bc(gp_, z_, theta_p_).value;
  return chi2_bc(gl_, z_, theta_l_, variant_).value;
}

bool FiberChain::step(Rng& rng) {
  if (!proposer_->has_eligible_pair()) return false;
  if (family_ == Family::Poisson) {
    const PoissonMove move = proposer_->propose_poisson(rng);
    if (!is_feasible(gp_, move)) return false;
    const double log_ratio = log_base_measure_ratio(gp_, move);
    if (log_ratio < 0.0 && rng.uniform01() >= std::exp(log_ratio)) return false;
    apply_move(gp_, move);
    update_cell(move.add[0], z_.labels[move.add[1]], 0, +1);
    update_cell(move.add[1], z_.labels[move.add[0]], 0, +1);
    update_cell(move.sub[0], z_.labels[move.sub[1]], 0, -1);
    update_cell(move.sub[1], z_.labels[move.sub[0]], 0, -1);
    return true;
  }
  const LabeledMove move = proposer_->propose_labeled(gl_.num_labels, rng);
  if (!is_feasible(gl_, move)) return false;
  const double log_ratio = log_base_measure_ratio(gl_, move);
  if (log_ratio < 0.0 && rng.uniform01() >= std::exp(log_ratio)) return false;
  apply_move(gl_, move);
  update_cell(move.d1[0], z_.labels[move.d1[1]], move.label_to, +1);
  update_cell(move.d1[1], z_.labels[move.d1[0]], move.label_to, +1);
  update_cell(move.d1[0], z_.labels[move.d1[1]], move.label_from, -1);
  update_cell(move.d1[1], z_.labels[move.d1[0]], move.label_from, -1);
  update_cell(move.d2[0], z_.labels[move.d2[1]], move.label_from, +1);
  update_cell(move.d2[1], z_.labels[move.d2[0]], move.label_from, +1);
  update_cell(move.d2[0], z_.labels[move.d2[1]], move.label_to, -1);
  update_cell(move.d2[1], z_.labels[move.d2[0]], move.label_to, -1);
  return true;
}

namespace {

ChainResult finish_chain(FiberChain& chain, const ChainConfig& cfg, Rng& rng) {
  if (cfg.num_graphs < 1) throw std::invalid_argument("run_chain: num_graphs must be positive");
  if (cfg.thinning < 1) throw std::invalid_argument("run_chain: thinning must be positive");
  if (cfg.burn_in < 0) throw std::invalid_argument("run_chain: burn_in must be nonnegative");

  ChainResult out;
  out.observed_gof = chain.gof();
  out.skipped_cells = chain.skipped_cells();
  out.gof_samples.reserve(static_cast<std::size_t>(cfg.num_graphs));

  if (chain.degenerate()) {
    out.singleton_warning = true;
    out.gof_samples.assign(static_cast<std::size_t>(cfg.num_graphs), out.observed_gof);
    out.pvalue = 1.0;
    out.ess = 0.0;
    return out;
  }

  std::int64_t accepted = 0;
  for (std::int64_t i = 0; i < cfg.burn_in; ++i) accepted += chain.step(rng) ? 1 : 0;
  std::int64_t exceed = 0;
  for (std::int64_t s = 0; s < cfg.num_graphs; ++s) {
    for (std::int64_t i = 0; i < cfg.thinning; ++i) accepted += chain.step(rng) ? 1 : 0;
    const double value = chain.gof();
    out.gof_samples.push_back(value);
    if (value >= out.observed_gof) ++exceed;
  }
  out.pvalue = static_cast<double>(exceed) / static_cast<double>(cfg.num_graphs);
  out.acceptance_rate = static_cast<double>(accepted) /
                        static_cast<double>(cfg.burn_in + cfg.num_graphs * cfg.thinning);

  double mean = 0.0;
  for (double v : out.gof_samples) mean += v;
  mean /= static_cast<double>(out.gof_samples.size());
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < out.gof_samples.size(); ++i) {
    const double d = out.gof_samples[i] - mean;
    var += d * d;
    if (i > 0) cov += d * (out.gof_samples[i - 1] - mean);
  }
  if (var > 0.0) {
    const double rho = cov / var;
    out.gof_autocorr1 = rho;
    const double clamped = std::min(std::max(rho, -0.999), 0.999);
    out.ess = static_cast<double>(out.gof_samples.size()) * (1.0 - clamped) / (1.0 + clamped);
  } else {
    out.gof_autocorr1 = 0.0;
    out.ess = 0.0;
  }
  return out;
}

void check_chain_assignment(const BlockAssignment& z) {
  if (has_empty_blocks(z)) throw std::invalid_argument("run_chain: empty block");
}

}  // namespace

ChainResult run_chain(const ValuedNetwork& g, const BlockAssignment& z, const ChainConfig& cfg) {
  check_chain_assignment(z);
  FiberChain chain(g, z);
  Rng rng(cfg.seed);
  return finish_chain(chain, cfg, rng);
}

ChainResult run_chain(const LabeledNetwork& g, const BlockAssignment& z, GofVariant variant,
                      const ChainConfig& cfg) {
  check_chain_assignment(z);
  FiberChain chain(g, z, variant);
  Rng rng(cfg.seed);
  return finish_chain(chain, cfg, rng);
}

}  // namespace vsbm
