#pragma once

#include <span>
#include <string>
#include <vector>

#include "ecfsfdp/dataset.hpp"
#include "ecfsfdp/density.hpp"
#include "ecfsfdp/evaluate.hpp"
#include "ecfsfdp/merge.hpp"
#include "ecfsfdp/simgraph.hpp"

namespace ecfsfdp {

// Text encodings shared by the CLI and the HTTP server, so both emit the
// same bytes for the same input.

/// JSON array of {index, rho, delta, gamma}, sorted by gamma descending.
std::string decision_graph_json(const std::vector<DecisionRecord>& records);

/// {"initial_labels": [...], "steps": [...], "labels": [...]}.
std::string trace_json(const MergeTrace& trace);

/// {"labels": [...], "trace": {...}} as answered by POST /cluster.
std::string cluster_response_json(const MergeTrace& trace);

/// {"dim": D, "points": [[x, y, ...], ...], "truth": [...] or null}.
std::string points_json(const PointSet& points);

/// One {"u":..,"v":..,"w":..} object per line.
std::string edges_jsonl(std::span<const Edge> edges);

std::string eval_report_json(const EvalReport& report);

/// One integer per line.
std::string labels_text(std::span<const ClusterId> labels);

/// Parses a one-integer-per-line label file body.
std::vector<ClusterId> parse_labels(std::string_view text);

}  // namespace ecfsfdp
