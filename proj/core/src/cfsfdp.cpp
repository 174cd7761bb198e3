#include "ecfsfdp/cfsfdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecfsfdp {

CenterSet::CenterSet(std::vector<std::size_t> centers, std::size_t n, Provenance provenance)
    : centers_(std::move(centers)), provenance_(provenance) {
  if (centers_.empty()) throw ParameterError("center set must not be empty");
  std::sort(centers_.begin(), centers_.end());
  if (std::adjacent_find(centers_.begin(), centers_.end()) != centers_.end())
    throw ParameterError("center set contains duplicate indices");
  if (centers_.back() >= n)
    throw ParameterError("center index " + std::to_string(centers_.back()) +
                         " out of range for " + std::to_string(n) + " points");
}

bool CenterSet::contains(std::size_t i) const {
  return std::binary_search(centers_.begin(), centers_.end(), i);
}

std::vector<std::vector<std::size_t>> Labeling::members() const {
  std::vector<std::vector<std::size_t>> out(clusters);
  for (std::size_t i = 0; i < label.size(); ++i)
    out[static_cast<std::size_t>(label[i])].push_back(i);
  return out;
}

std::vector<ClusterId> canonicalize(std::vector<ClusterId>& labels) {
  ClusterId max_id = -1;
  for (auto l : labels) max_id = std::max(max_id, l);
  std::vector<ClusterId> remap(static_cast<std::size_t>(max_id + 1), -1);
  ClusterId next = 0;
  for (auto& l : labels) {
    auto& slot = remap[static_cast<std::size_t>(l)];
    if (slot < 0) slot = next++;
    l = slot;
  }
  return remap;
}

CenterSet select_centers_auto(const std::vector<DecisionRecord>& graph, std::size_t count) {
  if (count == 0 || count > graph.size())
    throw ParameterError("auto center count " + std::to_string(count) + " must be in [1, " +
                         std::to_string(graph.size()) + "]");
  auto ranked = sorted_by_gamma(graph);
  std::vector<std::size_t> centers;
  centers.reserve(count);
  for (std::size_t r = 0; r < count; ++r) centers.push_back(ranked[r].index);
  return CenterSet(std::move(centers), graph.size(), CenterSet::Provenance::kAuto);
}

std::size_t default_center_count(const std::vector<DecisionRecord>& graph, std::size_t k) {
  const std::size_t n = graph.size();
  if (n == 0) return 0;
  double mean = 0.0;
  for (const auto& r : graph) mean += r.gamma;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& r : graph) var += (r.gamma - mean) * (r.gamma - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double cut = mean + 3.0 * sd;
  const auto outliers = static_cast<std::size_t>(std::count_if(
      graph.begin(), graph.end(), [cut](const DecisionRecord& r) { return r.gamma > cut; }));

  const std::size_t cap = std::max(k, n / 10);
  return std::clamp(std::max(2 * k, outliers), std::min(k, n), std::min(cap, n));
}

Labeling assign(const DensityProfile& profile, const CenterSet& centers,
                const DistanceMatrix& dm, AssignStats* stats) {
  const std::size_t n = profile.size();
  Labeling out;
  out.label.assign(n, -1);

  // Provisional ids follow the density order of the centers.
  std::vector<ClusterId> center_id(n, -1);
  std::vector<std::size_t> center_of;
  for (std::size_t idx : profile.order) {
    if (centers.contains(idx)) {
      center_id[idx] = static_cast<ClusterId>(center_of.size());
      center_of.push_back(idx);
    }
  }

  std::size_t writes = 0;
  for (std::size_t idx : profile.order) {
    if (center_id[idx] >= 0) {
      out.label[idx] = center_id[idx];
    } else if (profile.parent[idx] != kNoParent) {
      out.label[idx] = out.label[profile.parent[idx]];
    } else {
      std::size_t nearest = centers.indices().front();
      double best = dm(idx, nearest);
      for (std::size_t c : centers.indices()) {
        const double d = dm(idx, c);
        if (d < best) {
          best = d;
          nearest = c;
        }
      }
      out.label[idx] = center_id[nearest];
      out.root_reassigned = true;
    }
    ++writes;
  }
  if (stats) stats->label_writes = writes;

  auto remap = canonicalize(out.label);
  out.clusters = center_of.size();
  std::vector<std::size_t> canonical_centers(center_of.size());
  for (std::size_t c = 0; c < center_of.size(); ++c)
    canonical_centers[static_cast<std::size_t>(remap[c])] = center_of[c];
  out.centers = std::move(canonical_centers);
  return out;
}

Labeling bisect_cluster(std::span<const std::size_t> members, const DistanceMatrix& dm,
                        double dc) {
  const std::size_t m = members.size();
  if (m < 2) throw ParameterError("bisect_cluster requires at least 2 members");

  DistanceMatrix sub(m);
  for (std::size_t a = 0; a + 1 < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) sub.set(a, b, dm(members[a], members[b]));

  const auto profile = compute_profile(sub, dc);
  const auto centers = select_centers_auto(decision_graph(profile), 2);
  return assign(profile, centers, sub);
}

}  // namespace ecfsfdp
