#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "vsbm/gof.hpp"
#include "vsbm/harness.hpp"
#include "vsbm/io.hpp"
#include "vsbm/testing.hpp"
#include "vsbm/version.hpp"

namespace py = pybind11;
using namespace vsbm;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::null:
      return py::none();
    case nlohmann::ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::ordered_json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::ordered_json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::ordered_json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

ThetaPoisson theta_poisson_from_matrix(const std::vector<std::vector<double>>& rows) {
  const int k = static_cast<int>(rows.size());
  ThetaPoisson theta;
  theta.num_blocks = k;
  theta.rates.assign(num_pairs(k), 0.0);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[i].size()) != k)
      throw std::invalid_argument("theta must be a square matrix");
    for (int j = i; j < k; ++j) {
      if (rows[i][j] != rows[j][i]) throw std::invalid_argument("theta must be symmetric");
      theta.at_ref(i, j) = rows[i][j];
    }
  }
  return theta;
}

std::vector<std::vector<double>> theta_poisson_to_matrix(const ThetaPoisson& theta) {
  const int k = theta.num_blocks;
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) rows[i][j] = theta.at(i, j);
  return rows;
}

BlockAssignment assignment_from_labels(const std::vector<int>& labels_1based) {
  if (labels_1based.empty()) throw std::invalid_argument("empty assignment");
  std::vector<int> labels(labels_1based.size());
  int k = 0;
  for (std::size_t u = 0; u < labels_1based.size(); ++u) {
    if (labels_1based[u] < 1) throw std::invalid_argument("block labels are 1-based");
    labels[u] = labels_1based[u] - 1;
    k = std::max(k, labels_1based[u]);
  }
  return BlockAssignment(k, std::move(labels));
}

std::vector<int> assignment_to_labels(const BlockAssignment& z) {
  std::vector<int> out(z.labels.size());
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = z.labels[u] + 1;
  return out;
}

TestOptions make_options(std::int64_t num_graphs, std::uint64_t seed, std::int64_t thinning,
                         std::int64_t burn_in, const std::string& gof, int draws, int restarts,
                         int threads, bool keep_samples) {
  TestOptions opts;
  opts.chain.num_graphs = num_graphs;
  opts.chain.seed = seed;
  opts.chain.thinning = thinning;
  opts.chain.burn_in = burn_in;
  if (gof == "bc-full")
    opts.gof = GofVariant::BlockCorrectedFullL;
  else if (gof != "bc")
    throw std::invalid_argument("gof must be 'bc' or 'bc-full'");
  opts.posterior_draws = draws;
  opts.vem.restarts = restarts;
  opts.threads = threads;
  opts.keep_samples = keep_samples;
  return opts;
}

}  // namespace

PYBIND11_MODULE(vsbm, m) {
  m.doc() = "Finite-sample goodness-of-fit tests for valued stochastic blockmodels";
  m.attr("__version__") = kVersion;

  py::class_<ValuedNetwork>(m, "ValuedNetwork")
      .def(py::init<int>(), py::arg("n"))
      .def_readonly("n", &ValuedNetwork::n)
      .def("get", [](const ValuedNetwork& g, int u, int v) { return g.at(u, v); })
      .def("set",
           [](ValuedNetwork& g, int u, int v, std::int64_t c) {
             if (u == v) throw std::invalid_argument("no self-loops");
             g.at(u, v) = c;
           })
      .def("total", &ValuedNetwork::total);

  py::class_<LabeledNetwork>(m, "LabeledNetwork")
      .def(py::init<int, int>(), py::arg("n"), py::arg("num_labels"))
      .def_readonly("n", &LabeledNetwork::n)
      .def_readonly("num_labels", &LabeledNetwork::num_labels)
      .def("get", [](const LabeledNetwork& g, int u, int v, int l) { return g.at(u, v, l); })
      .def("set", [](LabeledNetwork& g, int u, int v, int l, std::int64_t c) {
        if (u == v) throw std::invalid_argument("no self-loops");
        g.at(u, v, l) = c;
      });

  m.def("builtin_thetas", [] {
    std::vector<std::vector<std::vector<double>>> out;
    for (const ThetaPoisson& t : builtin_thetas()) out.push_back(theta_poisson_to_matrix(t));
    return out;
  });

  m.def(
      "sample_poisson_sbm",
      [](int n, const std::vector<double>& pi, const std::vector<std::vector<double>>& theta,
         std::uint64_t seed) {
        Rng rng(seed);
        auto [g, z] = sample_poisson_sbm(n, pi, theta_poisson_from_matrix(theta), rng);
        return py::make_tuple(g, assignment_to_labels(z));
      },
      py::arg("n"), py::arg("pi"), py::arg("theta"), py::arg("seed"));

  m.def(
      "agreement",
      [](const std::vector<int>& za, const std::vector<int>& zb) {
        return agreement(assignment_from_labels(za), assignment_from_labels(zb));
      },
      py::arg("z1"), py::arg("z2"));

  m.def(
      "expected_chi2_on_fiber",
      [](const std::vector<int>& z, int num_labels) {
        return expected_chi2_on_fiber(block_summary(assignment_from_labels(z)), num_labels);
      },
      py::arg("assignment"), py::arg("num_labels"));

  m.def(
      "test_fixed",
      [](const ValuedNetwork& g, const std::vector<int>& z, std::int64_t num_graphs,
         std::uint64_t seed, std::int64_t thinning, std::int64_t burn_in, bool keep_samples) {
        const TestOptions opts =
            make_options(num_graphs, seed, thinning, burn_in, "bc", 1, 1, 1, keep_samples);
        return json_to_py(io::to_json(test_fixed(g, assignment_from_labels(z), opts)));
      },
      py::arg("g"), py::arg("assignment"), py::arg("num_graphs") = 1000, py::arg("seed") = 12345,
      py::arg("thinning") = 1, py::arg("burn_in") = 0, py::arg("keep_samples") = false);

  m.def(
      "test_latent",
      [](const ValuedNetwork& g, int k, std::int64_t num_graphs, std::uint64_t seed,
         std::int64_t thinning, std::int64_t burn_in, int draws, int restarts, int threads,
         bool keep_samples) {
        const TestOptions opts = make_options(num_graphs, seed, thinning, burn_in, "bc", draws,
                                              restarts, threads, keep_samples);
        return json_to_py(io::to_json(test_latent(g, k, opts)));
      },
      py::arg("g"), py::arg("k"), py::arg("num_graphs") = 1000, py::arg("seed") = 12345,
      py::arg("thinning") = 1, py::arg("burn_in") = 0, py::arg("draws") = 200,
      py::arg("restarts") = 10, py::arg("threads") = 1, py::arg("keep_samples") = false);

  m.def(
      "select_k",
      [](const ValuedNetwork& g, const std::vector<int>& ks, double alpha, std::int64_t num_graphs,
         std::uint64_t seed, std::int64_t thinning, std::int64_t burn_in, int draws, int restarts,
         int threads, bool full_trace) {
        const TestOptions opts =
            make_options(num_graphs, seed, thinning, burn_in, "bc", draws, restarts, threads, false);
        return json_to_py(io::to_json(select_k(g, ks, alpha, opts, full_trace)));
      },
      py::arg("g"), py::arg("ks"), py::arg("alpha") = 0.05, py::arg("num_graphs") = 1000,
      py::arg("seed") = 12345, py::arg("thinning") = 1, py::arg("burn_in") = 0,
      py::arg("draws") = 200, py::arg("restarts") = 10, py::arg("threads") = 1,
      py::arg("full_trace") = false);

  m.def(
      "read_valued_edge_list",
      [](const std::string& path) { return io::read_valued_edge_list_file(path); },
      py::arg("path"));
}
