#include "vsbm/blockinfer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace vsbm {

BlockAssignment VemFit::map_assignment() const {
  std::vector<int> labels(n);
  for (int u = 0; u < n; ++u) {
    int best = 0;
    for (int i = 1; i < num_blocks; ++i)
      if (tau_at(u, i) > tau_at(u, best)) best = i;
    labels[u] = best;
  }
  return BlockAssignment(num_blocks, std::move(labels));
}

namespace {

// k-means++ seeding plus Lloyd iterations on the rows of X.
std::vector<int> kmeans(const Eigen::MatrixXd& X, int k, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  const int dim = static_cast<int>(X.cols());
  std::vector<int> best_labels(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd centers(k, dim);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    centers.row(0) = X.row(rng.uniform_int(n));
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int u = 0; u < n; ++u) {
        d2[u] = std::min(d2[u], (X.row(u) - centers.row(c - 1)).squaredNorm());
        total += d2[u];
      }
      int pick;
      if (total > 0.0) {
        double target = rng.uniform01() * total;
        pick = n - 1;
        for (int u = 0; u < n; ++u) {
          target -= d2[u];
          if (target < 0.0) {
            pick = u;
            break;
          }
        }
      } else {
        pick = static_cast<int>(rng.uniform_int(n));
      }
      centers.row(c) = X.row(pick);
    }

    std::vector<int> labels(n, 0);
    double inertia = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
      bool changed = false;
      inertia = 0.0;
      for (int u = 0; u < n; ++u) {
        int arg = 0;
        double best = (X.row(u) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (X.row(u) - centers.row(c)).squaredNorm();
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        if (labels[u] != arg) changed = true;
        labels[u] = arg;
        inertia += best;
      }
      centers.setZero();
      std::vector<int> counts(k, 0);
      for (int u = 0; u < n; ++u) {
        centers.row(labels[u]) += X.row(u);
        ++counts[labels[u]];
      }
      for (int c = 0; c < k; ++c)
        if (counts[c] > 0) centers.row(c) /= counts[c];
      for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        // reseed an empty cluster at the point farthest from its own center
        int far = 0;
        double fd = -1.0;
        for (int u = 0; u < n; ++u) {
          if (counts[labels[u]] == 0) continue;
          const double d = (X.row(u) - centers.row(labels[u])).squaredNorm();
          if (d > fd) {
            fd = d;
            far = u;
          }
        }
        centers.row(c) = X.row(far);
        changed = true;
      }
      if (!changed) break;
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

BlockAssignment spectral_from_matrix(Eigen::MatrixXd A, int k, Rng& rng) {
  const int n = static_cast<int>(A.rows());
  if (k < 1) throw std::invalid_argument("spectral_init: need at least one block");
  if (k > n) throw std::invalid_argument("spectral_init: more blocks than nodes");
  if (k == 1) return BlockAssignment(1, std::vector<int>(n, 0));

  A.diagonal().setZero();
  const double mean = A.sum() / (static_cast<double>(n) * (n - 1));
  A.array() -= mean;
  A.diagonal().setZero();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  const Eigen::VectorXd& vals = solver.eigenvalues();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(vals[a]) > std::abs(vals[b]); });

  Eigen::MatrixXd X(n, k);
  for (int c = 0; c < k; ++c)
    X.col(c) = solver.eigenvectors().col(order[c]) * std::abs(vals[order[c]]);
  return BlockAssignment(k, kmeans(X, k, rng));
}

}  // namespace

BlockAssignment spectral_init(const ValuedNetwork& g, int k, Rng& rng) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      const double c = static_cast<double>(g.counts[dyad_index(u, v)]);
      A(u, v) = c;
      A(v, u) = c;
    }
  return spectral_from_matrix(std::move(A), k, rng);
}

BlockAssignment spectral_init(const LabeledNetwork& g, int k, Rng& rng) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      double score = 0.0;
      for (int l = 0; l < g.num_labels; ++l)
        score += static_cast<double>(l + 1) * static_cast<double>(g.at(u, v, l));
      A(u, v) = score;
      A(v, u) = score;
    }
  return spectral_from_matrix(std::move(A), k, rng);
}

namespace {

// Shared VEM engine.  The family enters through the per-dyad data matrices:
// for Poisson a single count matrix, for labeled one matrix per label, plus
// the matching complete-data log-likelihood pieces.
struct VemProblem {
  Family family;
  int n;
  int num_labels;                        // 1 for Poisson
  std::vector<Eigen::MatrixXd> data;     // symmetric count matrices, zero diagonal
  Eigen::MatrixXd totals;                // labeled: per-dyad totals; poisson: unused
  double log_h_sum;                      // constant base-measure part of the likelihood
};

VemProblem make_problem(const ValuedNetwork& g) {
  VemProblem p;
  p.family = Family::Poisson;
  p.n = g.n;
  p.num_labels = 1;
  p.data.assign(1, Eigen::MatrixXd::Zero(g.n, g.n));
  p.log_h_sum = 0.0;
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      const double c = static_cast<double>(g.counts[dyad_index(u, v)]);
      p.data[0](u, v) = c;
      p.data[0](v, u) = c;
      p.log_h_sum -= std::lgamma(c + 1.0);
    }
  return p;
}

VemProblem make_problem(const LabeledNetwork& g) {
  VemProblem p;
  p.family = Family::Labeled;
  p.n = g.n;
  p.num_labels = g.num_labels;
  p.data.assign(g.num_labels, Eigen::MatrixXd::Zero(g.n, g.n));
  p.totals = Eigen::MatrixXd::Zero(g.n, g.n);
  p.log_h_sum = 0.0;
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      double total = 0.0;
      for (int l = 0; l < g.num_labels; ++l) {
        const double c = static_cast<double>(g.at(u, v, l));
        p.data[l](u, v) = c;
        p.data[l](v, u) = c;
        total += c;
        p.log_h_sum -= std::lgamma(c + 1.0);
      }
      p.totals(u, v) = total;
      p.totals(v, u) = total;
      p.log_h_sum += std::lgamma(total + 1.0);
    }
  return p;
}

struct VemState {
  Eigen::MatrixXd tau;                    // n x k
  Eigen::VectorXd pi;                     // k
  std::vector<Eigen::MatrixXd> theta;     // per label, k x k symmetric
  std::vector<Eigen::MatrixXd> log_theta;
};

// M-step: pi and theta from tau.
void m_step(const VemProblem& p, VemState& s, int k, double floor) {
  s.pi = s.tau.colwise().mean();
  for (int i = 0; i < k; ++i) s.pi[i] = std::max(s.pi[i], floor);
  s.pi /= s.pi.sum();

  // pair weights W_ij = sum over dyads of tau_ui tau_vj (+ symmetric term)
  Eigen::VectorXd colsum = s.tau.colwise().sum();
  Eigen::MatrixXd W = colsum * colsum.transpose() - s.tau.transpose() * s.tau;
  W.diagonal() /= 2.0;

  s.theta.assign(p.num_labels, Eigen::MatrixXd::Zero(k, k));
  s.log_theta.assign(p.num_labels, Eigen::MatrixXd::Zero(k, k));
  std::vector<Eigen::MatrixXd> S(p.num_labels);
  for (int l = 0; l < p.num_labels; ++l) {
    S[l] = s.tau.transpose() * p.data[l] * s.tau;
    S[l].diagonal() /= 2.0;
  }
  if (p.family == Family::Poisson) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double w = std::max(W(i, j), 1e-300);
        s.theta[0](i, j) = std::max(S[0](i, j) / w, floor);
        s.log_theta[0](i, j) = std::log(s.theta[0](i, j));
      }
  } else {
    Eigen::MatrixXd T = s.tau.transpose() * p.totals * s.tau;
    T.diagonal() /= 2.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        double norm = 0.0;
        for (int l = 0; l < p.num_labels; ++l) {
          const double t = std::max(T(i, j), 1e-300);
          s.theta[l](i, j) = std::max(S[l](i, j) / t, floor);
          norm += s.theta[l](i, j);
        }
        for (int l = 0; l < p.num_labels; ++l) {
          s.theta[l](i, j) /= norm;
          s.log_theta[l](i, j) = std::log(s.theta[l](i, j));
        }
      }
  }
}

// Sequential E-step sweep; updates tau in place.
void e_step(const VemProblem& p, VemState& s, int k) {
  const int n = p.n;
  Eigen::VectorXd colsum = s.tau.colwise().sum();
  Eigen::VectorXd logpi(k);
  for (int i = 0; i < k; ++i) logpi[i] = std::log(s.pi[i]);

  std::vector<Eigen::VectorXd> c(p.num_labels, Eigen::VectorXd(k));
  Eigen::VectorXd score(k);
  for (int u = 0; u < n; ++u) {
    for (int l = 0; l < p.num_labels; ++l) c[l] = s.tau.transpose() * p.data[l].col(u);
    const Eigen::VectorXd tself = s.tau.row(u).transpose();

    for (int i = 0; i < k; ++i) {
      double v = logpi[i];
      if (p.family == Family::Poisson) {
        for (int j = 0; j < k; ++j)
          v += s.log_theta[0](i, j) * c[0][j] - s.theta[0](i, j) * (colsum[j] - tself[j]);
      } else {
        for (int j = 0; j < k; ++j)
          for (int l = 0; l < p.num_labels; ++l) v += s.log_theta[l](i, j) * c[l][j];
      }
      score[i] = v;
    }
    const double mx = score.maxCoeff();
    double norm = 0.0;
    for (int i = 0; i < k; ++i) {
      score[i] = std::exp(score[i] - mx);
      norm += score[i];
    }
    for (int i = 0; i < k; ++i) {
      const double nv = score[i] / norm;
      colsum[i] += nv - s.tau(u, i);
      s.tau(u, i) = nv;
    }
  }
}

double elbo(const VemProblem& p, const VemState& s, int k) {
  Eigen::VectorXd colsum = s.tau.colwise().sum();
  Eigen::MatrixXd W = colsum * colsum.transpose() - s.tau.transpose() * s.tau;
  W.diagonal() /= 2.0;

  double value = p.log_h_sum;
  for (int l = 0; l < p.num_labels; ++l) {
    Eigen::MatrixXd S = s.tau.transpose() * p.data[l] * s.tau;
    S.diagonal() /= 2.0;
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) value += S(i, j) * s.log_theta[l](i, j);
  }
  if (p.family == Family::Poisson) {
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) value -= s.theta[0](i, j) * W(i, j);
  }
  for (int u = 0; u < p.n; ++u)
    for (int i = 0; i < k; ++i) {
      const double t = s.tau(u, i);
      if (t > 0.0) value += t * (std::log(s.pi[i]) - std::log(t));
    }
  return value;
}

template <typename Net>
VemFit vem_fit_impl(const Net& g, const VemProblem& p, int k, const VemOptions& opts, Rng& rng) {
  if (k < 1) throw std::invalid_argument("vem_fit: need at least one block");
  if (k > p.n) throw std::invalid_argument("vem_fit: more blocks than nodes");
  if (opts.restarts < 1) throw std::invalid_argument("vem_fit: need at least one restart");
  const int n = p.n;

  VemFit best;
  best.elbo = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    Rng local = rng.derive(r);
    VemState s;
    s.tau.resize(n, k);
    if (r == 0) {
      const BlockAssignment init = spectral_init(g, k, local);
      s.tau.setConstant(k == 1 ? 1.0 : 0.05 / (k - 1));
      for (int u = 0; u < n; ++u) s.tau(u, init.labels[u]) = k == 1 ? 1.0 : 0.95;
    } else {
      for (int u = 0; u < n; ++u) {
        double norm = 0.0;
        for (int i = 0; i < k; ++i) {
          s.tau(u, i) = -std::log(1.0 - local.uniform01() + 1e-300);
          norm += s.tau(u, i);
        }
        s.tau.row(u) /= norm;
      }
    }

    double prev = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool converged = false;
    int iters = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
      m_step(p, s, k, opts.param_floor);
      e_step(p, s, k);
      const double cur = elbo(p, s, k);
      trace.push_back(cur);
      iters = it + 1;
      if (it > 0 && cur - prev < opts.tol) {
        converged = true;
        prev = cur;
        break;
      }
      prev = cur;
    }
    m_step(p, s, k, opts.param_floor);

    if (prev > best.elbo) {
      best.elbo = prev;
      best.n = n;
      best.num_blocks = k;
      best.family = p.family;
      best.iterations = iters;
      best.converged = converged;
      best.elbo_trace = std::move(trace);
      best.tau.resize(static_cast<std::size_t>(n) * k);
      for (int u = 0; u < n; ++u)
        for (int i = 0; i < k; ++i) best.tau[static_cast<std::size_t>(u) * k + i] = s.tau(u, i);
      best.pi_hat.assign(s.pi.data(), s.pi.data() + k);
      if (p.family == Family::Poisson) {
        best.theta_poisson.num_blocks = k;
        best.theta_poisson.rates.assign(num_pairs(k), 0.0);
        for (int i = 0; i < k; ++i)
          for (int j = i; j < k; ++j) best.theta_poisson.at_ref(i, j) = s.theta[0](i, j);
      } else {
        best.theta_labeled.num_blocks = k;
        best.theta_labeled.num_labels = p.num_labels;
        best.theta_labeled.probs.assign(static_cast<std::size_t>(num_pairs(k)) * p.num_labels, 0.0);
        for (int i = 0; i < k; ++i)
          for (int j = i; j < k; ++j)
            for (int l = 0; l < p.num_labels; ++l) best.theta_labeled.at_ref(i, j, l) = s.theta[l](i, j);
      }
    }
  }
  return best;
}

}  // namespace

VemFit vem_fit(const ValuedNetwork& g, int k, const VemOptions& opts, Rng& rng) {
  return vem_fit_impl(g, make_problem(g), k, opts, rng);
}

VemFit vem_fit(const LabeledNetwork& g, int k, const VemOptions& opts, Rng& rng) {
  return vem_fit_impl(g, make_problem(g), k, opts, rng);
}

AssignmentPosterior posterior_support(const VemFit& fit, int num_draws, Rng& rng) {
  if (num_draws < 1) throw std::invalid_argument("posterior_support: need at least one draw");
  const int n = fit.n;
  const int k = fit.num_blocks;
  std::map<std::vector<int>, std::int64_t> counts;
  std::vector<double> row(k);
  for (int d = 0; d < num_draws; ++d) {
    std::vector<int> labels(n);
    for (int u = 0; u < n; ++u) {
      for (int i = 0; i < k; ++i) row[i] = fit.tau_at(u, i);
      labels[u] = rng.categorical(row);
    }
    ++counts[canonicalize(BlockAssignment(k, std::move(labels))).labels];
  }

  const int m = static_cast<int>(counts.size());
  const double eps = 1.0 / static_cast<double>(m);
  std::vector<std::pair<std::vector<int>, double>> entries;
  for (const auto& [labels, c] : counts)
    entries.emplace_back(labels, static_cast<double>(c) / static_cast<double>(num_draws));

  std::vector<std::pair<std::vector<int>, double>> kept;
  for (const auto& e : entries)
    if (e.second >= eps) kept.push_back(e);
  if (kept.empty()) {
    double top = 0.0;
    for (const auto& e : entries) top = std::max(top, e.second);
    for (const auto& e : entries)
      if (e.second == top) kept.push_back(e);
  }

  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  double total = 0.0;
  for (const auto& e : kept) total += e.second;

  AssignmentPosterior out;
  out.raw_support_size = m;
  for (auto& [labels, w] : kept) {
    const int used = *std::max_element(labels.begin(), labels.end()) + 1;
    out.support.emplace_back(used, labels);
    out.weights.push_back(w / total);
  }
  return out;
}

}  // namespace vsbm
