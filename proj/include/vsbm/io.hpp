#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "vsbm/harness.hpp"
#include "vsbm/network.hpp"
#include "vsbm/testing.hpp"

namespace vsbm::io {

// Malformed user input; messages carry the offending line number.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "u v c" lines, 1-based node ids, unlisted dyads zero.  Lines starting with
// '#' are comments; a non-numeric first line is treated as a header.
ValuedNetwork read_valued_edge_list(std::istream& in, std::optional<int> n = std::nullopt);
ValuedNetwork read_valued_edge_list_file(const std::string& path, std::optional<int> n = std::nullopt);

// "u v l c" lines with labels 1..L.  When fill_total is given, each dyad's
// unlisted remainder goes to fill_label (1-based; defaults to L).
LabeledNetwork read_labeled_edge_list(std::istream& in, int num_labels,
                                      std::optional<int> n = std::nullopt,
                                      std::optional<std::int64_t> fill_total = std::nullopt,
                                      std::optional<int> fill_label = std::nullopt);
LabeledNetwork read_labeled_edge_list_file(const std::string& path, int num_labels,
                                           std::optional<int> n = std::nullopt,
                                           std::optional<std::int64_t> fill_total = std::nullopt,
                                           std::optional<int> fill_label = std::nullopt);

// Dense symmetric count matrix, comma or whitespace separated, zero diagonal.
ValuedNetwork read_count_matrix(std::istream& in);
ValuedNetwork read_count_matrix_file(const std::string& path);

// "u b" lines, every node exactly once, blocks 1..k with no gaps.
BlockAssignment read_assignment(std::istream& in, int n);
BlockAssignment read_assignment_file(const std::string& path, int n);

void write_valued_edge_list(std::ostream& out, const ValuedNetwork& g);
void write_labeled_edge_list(std::ostream& out, const LabeledNetwork& g);
void write_assignment(std::ostream& out, const BlockAssignment& z);

nlohmann::ordered_json to_json(const TestReport& report);
nlohmann::ordered_json to_json(const SelectionReport& report);
nlohmann::ordered_json to_json(const PowerStudyResult& result);
nlohmann::ordered_json to_json(const ScalingStudyResult& result);

// Report files carry a timestamp envelope around a deterministic body:
// {"generated_at": ..., "body": ...}.  Replays compare bodies.
std::string render_report(const nlohmann::ordered_json& body);
void write_report_file(const std::string& path, const nlohmann::ordered_json& body);

}  // namespace vsbm::io
