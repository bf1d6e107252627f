#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsbm/harness.hpp"
#include "vsbm/io.hpp"
#include "vsbm/testing.hpp"
#include "vsbm/version.hpp"

namespace {

using nlohmann::ordered_json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("VSBM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw vsbm::io::InputError("VSBM_SEED is not an integer: " + std::string(env));
    }
  }
  return 12345;
}

// Flags shared by the commands that read a network.
struct InputFlags {
  std::string input;
  std::string format = "edgelist";  // or "matrix"
  std::string model = "poisson";    // or "labeled"
  int labels = 0;
  int n = 0;
  std::int64_t dyad_total = 0;
  int fill_label = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "network file")->required();
    cmd->add_option("--format", format, "edgelist or matrix")
        ->check(CLI::IsMember({"edgelist", "matrix"}));
    cmd->add_option("--model", model, "poisson or labeled")
        ->check(CLI::IsMember({"poisson", "labeled"}));
    cmd->add_option("--labels", labels, "number of labels (labeled model)");
    cmd->add_option("--n", n, "number of nodes (defaults to the largest id listed)");
    cmd->add_option("--dyad-total", dyad_total,
                    "constant per-dyad interaction total; unlisted remainder goes to the fill label");
    cmd->add_option("--fill-label", fill_label, "label receiving the remainder (default: last)");
  }

  bool labeled() const { return model == "labeled"; }

  vsbm::ValuedNetwork read_valued() const {
    if (format == "matrix") return vsbm::io::read_count_matrix_file(input);
    return vsbm::io::read_valued_edge_list_file(input,
                                                n > 0 ? std::optional<int>(n) : std::nullopt);
  }

  vsbm::LabeledNetwork read_labeled() const {
    if (format == "matrix")
      throw vsbm::io::InputError("matrix input is only supported for the poisson model");
    if (labels < 2) throw vsbm::io::InputError("labeled input needs --labels >= 2");
    return vsbm::io::read_labeled_edge_list_file(
        input, labels, n > 0 ? std::optional<int>(n) : std::nullopt,
        dyad_total > 0 ? std::optional<std::int64_t>(dyad_total) : std::nullopt,
        fill_label > 0 ? std::optional<int>(fill_label) : std::nullopt);
  }

  ordered_json to_json() const {
    ordered_json j;
    j["input"] = input;
    j["format"] = format;
    j["model"] = model;
    if (labeled()) {
      j["labels"] = labels;
      if (dyad_total > 0) j["dyad_total"] = dyad_total;
      if (fill_label > 0) j["fill_label"] = fill_label;
    }
    return j;
  }
};

struct ChainFlags {
  std::int64_t num_graphs = 1000;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string gof = "bc";  // or "bc-full"
  bool no_samples = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--num-graphs", num_graphs, "fiber samples per chain");
    cmd->add_option("--burn-in", burn_in, "discarded leading steps");
    cmd->add_option("--thinning", thinning, "steps between recorded samples");
    cmd->add_option("--seed", seed, "master seed (default: VSBM_SEED or 12345)")
        ->each([this](const std::string&) { seed_set = true; });
    cmd->add_option("--gof", gof, "statistic variant: bc (reference label dropped) or bc-full")
        ->check(CLI::IsMember({"bc", "bc-full"}));
    cmd->add_flag("--no-samples", no_samples, "omit per-sample GoF values from the report");
  }

  vsbm::TestOptions test_options(const InputFlags& in) {
    vsbm::TestOptions opts;
    opts.chain.num_graphs = num_graphs;
    opts.chain.burn_in = burn_in;
    opts.chain.thinning = thinning;
    opts.chain.seed = seed_set ? seed : default_seed();
    if (gof == "bc-full") {
      if (!in.labeled())
        throw vsbm::io::InputError("--gof bc-full applies to the labeled model only");
      opts.gof = vsbm::GofVariant::BlockCorrectedFullL;
    }
    opts.keep_samples = !no_samples;
    return opts;
  }

  ordered_json to_json(const vsbm::TestOptions& opts) const {
    ordered_json j;
    j["num_graphs"] = opts.chain.num_graphs;
    j["burn_in"] = opts.chain.burn_in;
    j["thinning"] = opts.chain.thinning;
    j["seed"] = opts.chain.seed;
    j["gof"] = gof;
    return j;
  }
};

ordered_json report_body(const std::string& command, ordered_json config, ordered_json result) {
  ordered_json body;
  body["tool"] = "vsbm";
  body["version"] = vsbm::kVersion;
  body["command"] = command;
  body["config"] = std::move(config);
  body["result"] = std::move(result);
  return body;
}

void emit(const ordered_json& body, const std::string& out_path, const std::string& summary) {
  if (out_path.empty()) {
    std::cout << vsbm::io::render_report(body);
  } else {
    vsbm::io::write_report_file(out_path, body);
    std::cout << summary << " -> " << out_path << "\n";
  }
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw vsbm::io::InputError(std::string(what) + ": bad entry '" + tok + "'");
    }
  }
  if (out.empty()) throw vsbm::io::InputError(std::string(what) + ": empty list");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Finite-sample goodness-of-fit tests for valued stochastic blockmodels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vsbm::kVersion);

  // ---- test-fixed ----
  auto* fixed = app.add_subcommand("test-fixed", "exact conditional test at a given assignment");
  InputFlags fixed_in;
  ChainFlags fixed_chain;
  std::string fixed_assignment, fixed_out;
  fixed_in.attach(fixed);
  fixed_chain.attach(fixed);
  fixed->add_option("--assignment", fixed_assignment, "block assignment file ('u b' lines)")
      ->required();
  fixed->add_option("--out", fixed_out, "report file (default: stdout)");

  // ---- test-latent / test-plugin ----
  auto* latent = app.add_subcommand("test-latent", "partial-Bayes test with estimated blocks");
  InputFlags latent_in;
  ChainFlags latent_chain;
  int latent_k = 0, latent_draws = 200, latent_restarts = 10, latent_threads = 1;
  bool latent_plugin = false;
  std::string latent_out, latent_inject;
  latent_in.attach(latent);
  latent_chain.attach(latent);
  latent->add_option("--k", latent_k, "number of blocks under test")->required();
  latent->add_option("--draws", latent_draws, "posterior support draws");
  latent->add_option("--restarts", latent_restarts, "estimator restarts");
  latent->add_option("--threads", latent_threads, "worker threads for per-fiber chains");
  latent->add_flag("--plugin", latent_plugin, "single plug-in assignment instead of partial Bayes");
  latent->add_option("--inject-assignment", latent_inject,
                     "use this assignment file instead of estimating (implies --plugin)");
  latent->add_option("--out", latent_out, "report file (default: stdout)");

  // ---- select-k ----
  auto* select = app.add_subcommand("select-k", "smallest k the data do not reject");
  InputFlags select_in;
  ChainFlags select_chain;
  int select_kmin = 1, select_kmax = 6, select_draws = 200, select_restarts = 10,
      select_threads = 1;
  double select_alpha = 0.05;
  bool select_full = false;
  std::string select_out;
  select_in.attach(select);
  select_chain.attach(select);
  select->add_option("--k-min", select_kmin, "smallest candidate k");
  select->add_option("--k-max", select_kmax, "largest candidate k");
  select->add_option("--alpha", select_alpha, "selection level");
  select->add_option("--draws", select_draws, "posterior support draws");
  select->add_option("--restarts", select_restarts, "estimator restarts");
  select->add_option("--threads", select_threads, "worker threads");
  select->add_flag("--full-trace", select_full, "keep testing after the first pass");
  select->add_option("--out", select_out, "report file (default: stdout)");

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "sample a planted blockmodel");
  std::string sim_family = "poisson", sim_out_network, sim_out_assignment, sim_q_file;
  int sim_n = 50, sim_theta_id = 1, sim_labels = 2;
  std::int64_t sim_dyad_total = 1;
  double sim_pi_decay = 0.0, sim_within = 0.8, sim_between = 0.2, sim_alpha_obs = 0.0;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  simulate->add_option("--family", sim_family, "poisson, labeled, or censored")
      ->check(CLI::IsMember({"poisson", "labeled", "censored"}));
  simulate->add_option("--n", sim_n, "number of nodes")->required();
  simulate->add_option("--theta-id", sim_theta_id, "built-in rate matrix 1..4 (poisson)");
  simulate->add_option("--pi-decay", sim_pi_decay, "geometric block-weight decay (default by id)");
  simulate->add_option("--labels", sim_labels, "labels (labeled family)");
  simulate->add_option("--dyad-total", sim_dyad_total, "interactions per dyad (labeled family)");
  simulate->add_option("--within", sim_within, "label-1 probability inside blocks (labeled)");
  simulate->add_option("--between", sim_between, "label-1 probability across blocks (labeled)");
  simulate->add_option("--alpha-obs", sim_alpha_obs, "observation probability (censored family)");
  simulate->add_option("--q-file", sim_q_file, "k x k edge probability matrix (censored family)");
  simulate->add_option("--seed", sim_seed, "seed")->each([&](const std::string&) {
    sim_seed_set = true;
  });
  simulate->add_option("--out-network", sim_out_network, "edge list to write")->required();
  simulate->add_option("--out-assignment", sim_out_assignment, "true assignment to write")
      ->required();

  // ---- power ----
  auto* power = app.add_subcommand("power", "replicated latent tests on planted data");
  int power_n = 50, power_replicates = 50, power_theta = 1, power_draws = 200,
      power_restarts = 10, power_threads = 1;
  std::string power_ks = "2,3,4,5", power_out;
  double power_alpha = 0.05, power_pi_decay = 0.0;
  ChainFlags power_chain;
  power->add_option("--n", power_n, "nodes per replicate");
  power->add_option("--replicates", power_replicates, "number of replicates");
  power->add_option("--theta-id", power_theta, "built-in rate matrix 1..4");
  power->add_option("--pi-decay", power_pi_decay, "geometric block-weight decay");
  power->add_option("--ks", power_ks, "comma-separated candidate k values");
  power->add_option("--alpha", power_alpha, "rejection level");
  power->add_option("--draws", power_draws, "posterior support draws");
  power->add_option("--restarts", power_restarts, "estimator restarts");
  power->add_option("--threads", power_threads, "worker threads across replicates");
  power_chain.attach(power);
  power->add_option("--out", power_out, "report file (default: stdout)");

  // ---- scaling ----
  auto* scaling = app.add_subcommand("scaling", "true-fit vs merged-fit statistic growth");
  std::string scaling_ns = "30,60,120", scaling_out;
  int scaling_replicates = 8, scaling_threads = 1;
  double scaling_within = 0.8, scaling_between = 0.2;
  std::int64_t scaling_steps = 20000, scaling_burn = 2000, scaling_thin = 10;
  std::uint64_t scaling_seed = 0;
  bool scaling_seed_set = false;
  scaling->add_option("--ns", scaling_ns, "comma-separated network sizes");
  scaling->add_option("--replicates", scaling_replicates, "replicates per size");
  scaling->add_option("--within", scaling_within, "label-1 probability inside blocks");
  scaling->add_option("--between", scaling_between, "label-1 probability across blocks");
  scaling->add_option("--steps", scaling_steps, "chain steps per replicate");
  scaling->add_option("--burn-in", scaling_burn, "discarded leading steps");
  scaling->add_option("--thin", scaling_thin, "steps between recorded states");
  scaling->add_option("--threads", scaling_threads, "worker threads");
  scaling->add_option("--seed", scaling_seed, "seed")->each([&](const std::string&) {
    scaling_seed_set = true;
  });
  scaling->add_option("--out", scaling_out, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (fixed->parsed()) {
    vsbm::TestOptions opts = fixed_chain.test_options(fixed_in);
    vsbm::TestReport report;
    int n;
    if (fixed_in.labeled()) {
      const vsbm::LabeledNetwork g = fixed_in.read_labeled();
      n = g.n;
      report = vsbm::test_fixed(g, vsbm::io::read_assignment_file(fixed_assignment, n), opts);
    } else {
      const vsbm::ValuedNetwork g = fixed_in.read_valued();
      n = g.n;
      report = vsbm::test_fixed(g, vsbm::io::read_assignment_file(fixed_assignment, n), opts);
    }
    ordered_json config = fixed_in.to_json();
    config["assignment"] = fixed_assignment;
    config["n"] = n;
    config["chain"] = fixed_chain.to_json(opts);
    emit(report_body("test-fixed", std::move(config), vsbm::io::to_json(report)), fixed_out,
         "pvalue " + std::to_string(report.pvalue));
    return 0;
  }

  if (latent->parsed()) {
    vsbm::TestOptions opts = latent_chain.test_options(latent_in);
    opts.vem.restarts = latent_restarts;
    opts.posterior_draws = latent_draws;
    opts.threads = latent_threads;
    if (latent_k < 1) throw vsbm::io::InputError("--k must be at least 1");
    const bool plugin = latent_plugin || !latent_inject.empty();
    vsbm::TestReport report;
    int n;
    if (latent_in.labeled()) {
      const vsbm::LabeledNetwork g = latent_in.read_labeled();
      n = g.n;
      std::optional<vsbm::BlockAssignment> injected;
      if (!latent_inject.empty()) injected = vsbm::io::read_assignment_file(latent_inject, n);
      report = plugin ? vsbm::test_plugin(g, latent_k, opts, injected)
                      : vsbm::test_latent(g, latent_k, opts);
    } else {
      const vsbm::ValuedNetwork g = latent_in.read_valued();
      n = g.n;
      std::optional<vsbm::BlockAssignment> injected;
      if (!latent_inject.empty()) injected = vsbm::io::read_assignment_file(latent_inject, n);
      report = plugin ? vsbm::test_plugin(g, latent_k, opts, injected)
                      : vsbm::test_latent(g, latent_k, opts);
    }
    ordered_json config = latent_in.to_json();
    config["n"] = n;
    config["k"] = latent_k;
    config["mode"] = plugin ? "plugin" : "latent";
    if (!latent_inject.empty()) config["inject_assignment"] = latent_inject;
    config["draws"] = latent_draws;
    config["restarts"] = latent_restarts;
    config["chain"] = latent_chain.to_json(opts);
    emit(report_body("test-latent", std::move(config), vsbm::io::to_json(report)), latent_out,
         "pvalue " + std::to_string(report.pvalue));
    return 0;
  }

  if (select->parsed()) {
    vsbm::TestOptions opts = select_chain.test_options(select_in);
    opts.vem.restarts = select_restarts;
    opts.posterior_draws = select_draws;
    opts.threads = select_threads;
    if (select_kmin < 1 || select_kmax < select_kmin)
      throw vsbm::io::InputError("need 1 <= --k-min <= --k-max");
    std::vector<int> ks;
    for (int k = select_kmin; k <= select_kmax; ++k) ks.push_back(k);
    vsbm::SelectionReport report;
    int n;
    if (select_in.labeled()) {
      const vsbm::LabeledNetwork g = select_in.read_labeled();
      n = g.n;
      report = vsbm::select_k(g, ks, select_alpha, opts, select_full);
    } else {
      const vsbm::ValuedNetwork g = select_in.read_valued();
      n = g.n;
      report = vsbm::select_k(g, ks, select_alpha, opts, select_full);
    }
    ordered_json config = select_in.to_json();
    config["n"] = n;
    config["k_min"] = select_kmin;
    config["k_max"] = select_kmax;
    config["alpha"] = select_alpha;
    config["full_trace"] = select_full;
    config["draws"] = select_draws;
    config["restarts"] = select_restarts;
    config["chain"] = select_chain.to_json(opts);
    const std::string summary = report.selected_k.has_value()
                                    ? "selected k = " + std::to_string(*report.selected_k)
                                    : "no k selected";
    emit(report_body("select-k", std::move(config), vsbm::io::to_json(report)), select_out,
         summary);
    return 0;
  }

  if (simulate->parsed()) {
    const std::uint64_t seed = sim_seed_set ? sim_seed : default_seed();
    vsbm::Rng rng(seed);
    std::ofstream net_out(sim_out_network);
    if (!net_out) throw vsbm::io::InputError("cannot open " + sim_out_network + " for writing");
    std::ofstream z_out(sim_out_assignment);
    if (!z_out) throw vsbm::io::InputError("cannot open " + sim_out_assignment + " for writing");

    vsbm::BlockAssignment z(1, std::vector<int>(sim_n, 0));
    if (sim_family == "poisson") {
      const auto thetas = vsbm::builtin_thetas();
      if (sim_theta_id < 1 || sim_theta_id > 4)
        throw vsbm::io::InputError("--theta-id must lie in 1..4");
      const double decay =
          sim_pi_decay > 0.0 ? sim_pi_decay : vsbm::builtin_pi_decay(sim_theta_id);
      const auto pi = vsbm::geometric_weights(decay, 4);
      auto [g, z_true] = vsbm::sample_poisson_sbm(sim_n, pi, thetas[sim_theta_id - 1], rng);
      vsbm::io::write_valued_edge_list(net_out, g);
      z = std::move(z_true);
    } else if (sim_family == "labeled") {
      if (sim_labels != 2)
        throw vsbm::io::InputError("labeled simulation uses --labels 2 (within/between design)");
      vsbm::ThetaLabeled theta;
      theta.num_blocks = 2;
      theta.num_labels = 2;
      theta.probs.assign(static_cast<std::size_t>(vsbm::num_pairs(2)) * 2, 0.0);
      theta.at_ref(0, 0, 0) = sim_within;
      theta.at_ref(0, 0, 1) = 1.0 - sim_within;
      theta.at_ref(1, 1, 0) = sim_within;
      theta.at_ref(1, 1, 1) = 1.0 - sim_within;
      theta.at_ref(0, 1, 0) = sim_between;
      theta.at_ref(0, 1, 1) = 1.0 - sim_between;
      const double decay = sim_pi_decay > 0.0 ? sim_pi_decay : 1.0;
      auto [g, z_true] = vsbm::sample_labeled_sbm(sim_n, vsbm::geometric_weights(decay, 2), theta,
                                                  sim_dyad_total, rng);
      vsbm::io::write_labeled_edge_list(net_out, g);
      z = std::move(z_true);
    } else {
      if (!(sim_alpha_obs > 0.0) || sim_alpha_obs > 1.0)
        throw vsbm::io::InputError("censored simulation needs --alpha-obs in (0, 1]");
      if (sim_q_file.empty()) throw vsbm::io::InputError("censored simulation needs --q-file");
      std::ifstream qin(sim_q_file);
      if (!qin) throw vsbm::io::InputError("cannot open " + sim_q_file);
      std::vector<double> q;
      double x;
      while (qin >> x) q.push_back(x);
      const int k = static_cast<int>(std::sqrt(static_cast<double>(q.size())));
      if (static_cast<std::size_t>(k) * k != q.size())
        throw vsbm::io::InputError("--q-file must hold a square matrix");
      const vsbm::ThetaLabeled theta = vsbm::censored_to_labeled(sim_alpha_obs, q, k);
      const double decay = sim_pi_decay > 0.0 ? sim_pi_decay : 1.0;
      auto [g, z_true] =
          vsbm::sample_labeled_sbm(sim_n, vsbm::geometric_weights(decay, k), theta, 1, rng);
      vsbm::io::write_labeled_edge_list(net_out, g);
      z = std::move(z_true);
    }
    vsbm::io::write_assignment(z_out, z);
    std::cout << "wrote " << sim_out_network << " and " << sim_out_assignment << " (seed " << seed
              << ")\n";
    return 0;
  }

  if (power->parsed()) {
    vsbm::PowerStudyConfig cfg;
    cfg.n = power_n;
    cfg.replicates = power_replicates;
    cfg.theta_id = power_theta;
    if (power_pi_decay > 0.0) cfg.pi_decay = power_pi_decay;
    cfg.ks = parse_int_list(power_ks, "--ks");
    cfg.alpha = power_alpha;
    cfg.threads = power_threads;
    InputFlags dummy;
    cfg.test = power_chain.test_options(dummy);
    cfg.test.vem.restarts = power_restarts;
    cfg.test.posterior_draws = power_draws;
    const vsbm::PowerStudyResult result = vsbm::power_study(cfg);
    ordered_json config;
    config["n"] = cfg.n;
    config["replicates"] = cfg.replicates;
    config["theta_id"] = cfg.theta_id;
    config["ks"] = cfg.ks;
    config["alpha"] = cfg.alpha;
    config["draws"] = power_draws;
    config["restarts"] = power_restarts;
    config["chain"] = power_chain.to_json(cfg.test);
    emit(report_body("power", std::move(config), vsbm::io::to_json(result)), power_out,
         "power study done");
    return 0;
  }

  if (scaling->parsed()) {
    vsbm::ScalingStudyConfig cfg;
    cfg.ns = parse_int_list(scaling_ns, "--ns");
    cfg.replicates = scaling_replicates;
    cfg.within = scaling_within;
    cfg.between = scaling_between;
    cfg.chain_steps = scaling_steps;
    cfg.burn_in = scaling_burn;
    cfg.thin = scaling_thin;
    cfg.seed = scaling_seed_set ? scaling_seed : default_seed();
    cfg.threads = scaling_threads;
    const vsbm::ScalingStudyResult result = vsbm::scaling_study(cfg);
    ordered_json config;
    config["ns"] = cfg.ns;
    config["replicates"] = cfg.replicates;
    config["within"] = cfg.within;
    config["between"] = cfg.between;
    config["steps"] = cfg.chain_steps;
    config["burn_in"] = cfg.burn_in;
    config["thin"] = cfg.thin;
    config["seed"] = cfg.seed;
    emit(report_body("scaling", std::move(config), vsbm::io::to_json(result)), scaling_out,
         "slope_true " + std::to_string(result.slope_true) + ", slope_merged " +
             std::to_string(result.slope_merged));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const vsbm::io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
