#include "vsbm/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace vsbm::io {

namespace {

[[noreturn]] void fail(std::int64_t line, const std::string& message) {
  throw InputError("line " + std::to_string(line) + ": " + message);
}

bool parse_int(const std::string& token, std::int64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(token, &pos);
    return pos == token.size();
  } catch (const std::exception&) {
    return false;
  }
}

struct LineReader {
  std::istream& in;
  std::int64_t line_no = 0;
  bool first_data_line = true;

  // returns tokens of the next data line, or false at end of input
  bool next(std::vector<std::string>& tokens, std::int64_t& at_line) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      tokens.clear();
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.empty()) continue;
      if (first_data_line) {
        first_data_line = false;
        std::int64_t probe;
        if (!parse_int(tokens[0], probe)) continue;  // header
      }
      at_line = line_no;
      return true;
    }
    return false;
  }
};

int require_node(const std::string& token, std::int64_t line, std::optional<int> n) {
  std::int64_t v;
  if (!parse_int(token, v)) fail(line, "expected a node id, got '" + token + "'");
  if (v < 1) fail(line, "node ids are 1-based, got " + token);
  if (n.has_value() && v > *n)
    fail(line, "node id " + token + " exceeds declared count " + std::to_string(*n));
  if (v > 1000000) fail(line, "node id " + token + " is implausibly large");
  return static_cast<int>(v);
}

}  // namespace

ValuedNetwork read_valued_edge_list(std::istream& in, std::optional<int> n) {
  LineReader reader{in};
  std::vector<std::string> tokens;
  std::int64_t line;
  struct Entry {
    int u, v;
    std::int64_t c;
    std::int64_t line;
  };
  std::vector<Entry> entries;
  int max_node = 0;
  while (reader.next(tokens, line)) {
    if (tokens.size() != 3) fail(line, "expected 'u v count'");
    int u = require_node(tokens[0], line, n);
    int v = require_node(tokens[1], line, n);
    if (u == v) fail(line, "self-loop on node " + tokens[0]);
    if (u > v) std::swap(u, v);
    std::int64_t c;
    if (!parse_int(tokens[2], c)) fail(line, "expected a count, got '" + tokens[2] + "'");
    if (c < 0) fail(line, "negative count " + tokens[2]);
    entries.push_back({u, v, c, line});
    max_node = std::max(max_node, v);
  }
  const int nodes = n.value_or(max_node);
  if (nodes < 1) throw InputError("edge list declares no nodes");
  ValuedNetwork g(nodes);
  std::map<std::int64_t, std::int64_t> seen;  // dyad -> first line
  for (const Entry& e : entries) {
    const std::int64_t d = dyad_index(e.u - 1, e.v - 1);
    const auto [it, fresh] = seen.emplace(d, e.line);
    if (!fresh)
      fail(e.line, "dyad (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") already listed on line " + std::to_string(it->second));
    g.counts[d] = e.c;
  }
  return g;
}

LabeledNetwork read_labeled_edge_list(std::istream& in, int num_labels, std::optional<int> n,
                                      std::optional<std::int64_t> fill_total,
                                      std::optional<int> fill_label) {
  if (num_labels < 2) throw InputError("labeled networks need at least two labels");
  const int fill = fill_label.value_or(num_labels);
  if (fill < 1 || fill > num_labels)
    throw InputError("fill label " + std::to_string(fill) + " outside 1.." +
                     std::to_string(num_labels));
  if (fill_total.has_value() && *fill_total < 1)
    throw InputError("dyad total must be positive");

  LineReader reader{in};
  std::vector<std::string> tokens;
  std::int64_t line;
  struct Entry {
    int u, v, l;
    std::int64_t c;
    std::int64_t line;
  };
  std::vector<Entry> entries;
  int max_node = 0;
  while (reader.next(tokens, line)) {
    if (tokens.size() != 4) fail(line, "expected 'u v label count'");
    int u = require_node(tokens[0], line, n);
    int v = require_node(tokens[1], line, n);
    if (u == v) fail(line, "self-loop on node " + tokens[0]);
    if (u > v) std::swap(u, v);
    std::int64_t l;
    if (!parse_int(tokens[2], l)) fail(line, "expected a label, got '" + tokens[2] + "'");
    if (l < 1 || l > num_labels)
      fail(line, "label " + tokens[2] + " outside 1.." + std::to_string(num_labels));
    std::int64_t c;
    if (!parse_int(tokens[3], c)) fail(line, "expected a count, got '" + tokens[3] + "'");
    if (c < 0) fail(line, "negative count " + tokens[3]);
    entries.push_back({u, v, static_cast<int>(l), c, line});
    max_node = std::max(max_node, v);
  }
  const int nodes = n.value_or(max_node);
  if (nodes < 1) throw InputError("edge list declares no nodes");
  LabeledNetwork g(nodes, num_labels);
  std::map<std::int64_t, std::int64_t> seen;  // (dyad, label) -> first line
  for (const Entry& e : entries) {
    const std::int64_t key = dyad_index(e.u - 1, e.v - 1) * num_labels + (e.l - 1);
    const auto [it, fresh] = seen.emplace(key, e.line);
    if (!fresh)
      fail(e.line, "dyad (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ") label " +
                       std::to_string(e.l) + " already listed on line " + std::to_string(it->second));
    g.counts[key] = e.c;
  }
  if (fill_total.has_value()) {
    for (std::int64_t d = 0; d < num_dyads(nodes); ++d) {
      std::int64_t listed = 0;
      for (int l = 0; l < num_labels; ++l)
        if (l != fill - 1) listed += g.counts[d * num_labels + l];
      listed += g.counts[d * num_labels + (fill - 1)];
      if (listed > *fill_total) {
        const auto [u, v] = dyad_from_index(d);
        throw InputError("dyad (" + std::to_string(u + 1) + ", " + std::to_string(v + 1) +
                         ") lists " + std::to_string(listed) + " interactions, more than the " +
                         "declared total " + std::to_string(*fill_total));
      }
      g.counts[d * num_labels + (fill - 1)] += *fill_total - listed;
    }
  }
  return g;
}

ValuedNetwork read_count_matrix(std::istream& in) {
  std::vector<std::vector<std::int64_t>> rows;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    std::vector<std::int64_t> row;
    std::string tok;
    while (ls >> tok) {
      std::int64_t v;
      if (!parse_int(tok, v)) fail(line_no, "expected an integer, got '" + tok + "'");
      if (v < 0) fail(line_no, "negative count " + tok);
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 1) throw InputError("count matrix is empty");
  for (int u = 0; u < n; ++u)
    if (rows[u].size() != static_cast<std::size_t>(n))
      throw InputError("count matrix row " + std::to_string(u + 1) + " has " +
                       std::to_string(rows[u].size()) + " columns, expected " + std::to_string(n));
  ValuedNetwork g(n);
  for (int u = 0; u < n; ++u) {
    if (rows[u][u] != 0)
      throw InputError("count matrix has a nonzero diagonal at row " + std::to_string(u + 1));
    for (int v = u + 1; v < n; ++v) {
      if (rows[u][v] != rows[v][u])
        throw InputError("count matrix is not symmetric at (" + std::to_string(u + 1) + ", " +
                         std::to_string(v + 1) + ")");
      g.counts[dyad_index(u, v)] = rows[u][v];
    }
  }
  return g;
}

BlockAssignment read_assignment(std::istream& in, int n) {
  LineReader reader{in};
  std::vector<std::string> tokens;
  std::int64_t line;
  std::vector<int> labels(n, -1);
  std::vector<std::int64_t> where(n, 0);
  int max_label = 0;
  while (reader.next(tokens, line)) {
    if (tokens.size() != 2) fail(line, "expected 'u block'");
    const int u = require_node(tokens[0], line, n);
    std::int64_t b;
    if (!parse_int(tokens[1], b)) fail(line, "expected a block id, got '" + tokens[1] + "'");
    if (b < 1) fail(line, "block ids are 1-based, got " + tokens[1]);
    if (labels[u - 1] >= 0)
      fail(line, "node " + tokens[0] + " already assigned on line " + std::to_string(where[u - 1]));
    labels[u - 1] = static_cast<int>(b - 1);
    where[u - 1] = line;
    max_label = std::max(max_label, static_cast<int>(b));
  }
  for (int u = 0; u < n; ++u)
    if (labels[u] < 0) throw InputError("node " + std::to_string(u + 1) + " has no block assignment");
  std::vector<char> used(max_label, false);
  for (int l : labels) used[l] = true;
  for (int b = 0; b < max_label; ++b)
    if (!used[b])
      throw InputError("block " + std::to_string(b + 1) + " is empty; blocks must be numbered 1.." +
                       std::to_string(max_label) + " with every block used");
  return BlockAssignment(max_label, std::move(labels));
}

namespace {

template <typename Fn>
auto with_file(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return fn(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace

ValuedNetwork read_valued_edge_list_file(const std::string& path, std::optional<int> n) {
  return with_file(path, [&](std::istream& in) { return read_valued_edge_list(in, n); });
}

LabeledNetwork read_labeled_edge_list_file(const std::string& path, int num_labels,
                                           std::optional<int> n,
                                           std::optional<std::int64_t> fill_total,
                                           std::optional<int> fill_label) {
  return with_file(path, [&](std::istream& in) {
    return read_labeled_edge_list(in, num_labels, n, fill_total, fill_label);
  });
}

ValuedNetwork read_count_matrix_file(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_count_matrix(in); });
}

BlockAssignment read_assignment_file(const std::string& path, int n) {
  return with_file(path, [&](std::istream& in) { return read_assignment(in, n); });
}

void write_valued_edge_list(std::ostream& out, const ValuedNetwork& g) {
  out << "# " << g.n << " nodes\n";
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      const std::int64_t c = g.counts[dyad_index(u, v)];
      if (c != 0) out << (u + 1) << ' ' << (v + 1) << ' ' << c << '\n';
    }
}

void write_labeled_edge_list(std::ostream& out, const LabeledNetwork& g) {
  out << "# " << g.n << " nodes, " << g.num_labels << " labels\n";
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u)
      for (int l = 0; l < g.num_labels; ++l) {
        const std::int64_t c = g.at(u, v, l);
        if (c != 0) out << (u + 1) << ' ' << (v + 1) << ' ' << (l + 1) << ' ' << c << '\n';
      }
}

void write_assignment(std::ostream& out, const BlockAssignment& z) {
  for (int u = 0; u < z.n(); ++u) out << (u + 1) << ' ' << (z.labels[u] + 1) << '\n';
}

namespace {

nlohmann::ordered_json fiber_json(const FiberReport& fr) {
  nlohmann::ordered_json j;
  j["weight"] = fr.weight;
  j["pvalue"] = fr.pvalue;
  j["observed_gof"] = fr.observed_gof;
  j["num_blocks"] = fr.assignment.num_blocks;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (int l : fr.assignment.labels) labels.push_back(l + 1);
  j["assignment"] = std::move(labels);
  j["seed"] = fr.seed;
  j["acceptance_rate"] = fr.acceptance_rate;
  j["gof_autocorr1"] = fr.gof_autocorr1;
  j["ess"] = fr.ess;
  j["skipped_cells"] = fr.skipped_cells;
  j["singleton_warning"] = fr.singleton_warning;
  if (!fr.gof_samples.empty()) j["gof_samples"] = fr.gof_samples;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const TestReport& report) {
  nlohmann::ordered_json j;
  j["pvalue"] = report.pvalue;
  j["observed_gof"] = report.observed_gof;
  j["master_seed"] = report.master_seed;
  if (report.estimator.has_value()) {
    nlohmann::ordered_json e;
    e["elbo"] = report.estimator->elbo;
    e["converged"] = report.estimator->converged;
    e["iterations"] = report.estimator->iterations;
    e["requested_k"] = report.estimator->requested_k;
    e["effective_k"] = report.estimator->effective_k;
    e["posterior_raw_size"] = report.estimator->posterior_raw_size;
    j["estimator"] = std::move(e);
  }
  nlohmann::ordered_json fibers = nlohmann::ordered_json::array();
  for (const FiberReport& fr : report.fibers) fibers.push_back(fiber_json(fr));
  j["fibers"] = std::move(fibers);
  j["warnings"] = report.warnings;
  return j;
}

nlohmann::ordered_json to_json(const SelectionReport& report) {
  nlohmann::ordered_json j;
  if (report.selected_k.has_value())
    j["selected_k"] = *report.selected_k;
  else
    j["selected_k"] = nullptr;
  j["alpha"] = report.alpha;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const SelectionEntry& e : report.trace) {
    nlohmann::ordered_json entry;
    entry["k"] = e.k;
    entry["report"] = to_json(e.report);
    trace.push_back(std::move(entry));
  }
  j["trace"] = std::move(trace);
  return j;
}

nlohmann::ordered_json to_json(const PowerStudyResult& result) {
  nlohmann::ordered_json j;
  j["alpha"] = result.alpha;
  j["master_seed"] = result.master_seed;
  j["ks"] = result.ks;
  j["rejection_rate"] = result.rejection_rate;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const PowerRow& r : result.rows) {
    nlohmann::ordered_json row;
    row["replicate"] = r.replicate;
    row["k"] = r.k;
    row["pvalue"] = r.pvalue;
    row["reject"] = r.reject;
    row["seed"] = r.seed;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

nlohmann::ordered_json to_json(const ScalingStudyResult& result) {
  nlohmann::ordered_json j;
  j["ns"] = result.ns;
  j["true_means"] = result.true_means;
  j["merged_means"] = result.merged_means;
  j["slope_true"] = result.slope_true;
  j["slope_merged"] = result.slope_merged;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ScalingRow& r : result.rows) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    row["replicate"] = r.replicate;
    row["true_mean"] = r.true_mean;
    row["merged_mean"] = r.merged_mean;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string render_report(const nlohmann::ordered_json& body) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  nlohmann::ordered_json envelope;
  envelope["generated_at"] = stamp;
  envelope["body"] = body;
  return envelope.dump(2) + "\n";
}

void write_report_file(const std::string& path, const nlohmann::ordered_json& body) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << render_report(body);
}

}  // namespace vsbm::io
