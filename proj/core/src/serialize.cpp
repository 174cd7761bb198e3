#include "ecfsfdp/serialize.hpp"

#include <charconv>

#include "json.hpp"

namespace ecfsfdp {

using nlohmann::json;

namespace {

json steps_json(const MergeTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"a", s.a},
                     {"b", s.b},
                     {"ri", s.ri},
                     {"rc", s.rc},
                     {"score", s.score},
                     {"merged", s.merged},
                     {"clusters_after", s.clusters_after},
                     {"fallback", s.fallback}});
  }
  return steps;
}

json trace_object(const MergeTrace& trace) {
  return {{"initial_labels", trace.initial.label},
          {"initial_clusters", trace.initial.clusters},
          {"steps", steps_json(trace)},
          {"labels", trace.final.label}};
}

}  // namespace

std::string decision_graph_json(const std::vector<DecisionRecord>& records) {
  json out = json::array();
  for (const auto& r : sorted_by_gamma(records))
    out.push_back({{"index", r.index}, {"rho", r.rho}, {"delta", r.delta}, {"gamma", r.gamma}});
  return out.dump();
}

std::string trace_json(const MergeTrace& trace) { return trace_object(trace).dump(); }

std::string cluster_response_json(const MergeTrace& trace) {
  json out = {{"labels", trace.final.label}, {"trace", trace_object(trace)}};
  return out.dump();
}

std::string points_json(const PointSet& points) {
  json pts = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  json out = {{"dim", points.dim()}, {"points", std::move(pts)}};
  out["truth"] = points.has_truth() ? json(points.truth()) : json(nullptr);
  return out.dump();
}

std::string edges_jsonl(std::span<const Edge> edges) {
  std::string out;
  for (const auto& e : edges) {
    out += json{{"u", e.u}, {"v", e.v}, {"w", e.weight}}.dump();
    out += '\n';
  }
  return out;
}

std::string eval_report_json(const EvalReport& report) {
  json out = {{"accuracy", report.accuracy},
              {"ari", report.ari},
              {"clusters_found", report.clusters_found},
              {"clusters_expected", report.clusters_expected},
              {"confusion", report.table.counts}};
  return out.dump(2);
}

std::string labels_text(std::span<const ClusterId> labels) {
  std::string out;
  out.reserve(labels.size() * 3);
  for (auto l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

std::vector<ClusterId> parse_labels(std::string_view text) {
  std::vector<ClusterId> out;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++row;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    ClusterId v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw DataError("row " + std::to_string(row) + ": malformed label '" + std::string(line) +
                      "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace ecfsfdp
