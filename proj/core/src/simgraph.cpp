#include "ecfsfdp/simgraph.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace ecfsfdp {

SimilarityGraph::SimilarityGraph(std::size_t k, std::vector<std::vector<Neighbor>> adjacency)
    : k_(k), adjacency_(std::move(adjacency)) {
  sorted_ids_.resize(adjacency_.size());
  for (std::size_t u = 0; u < adjacency_.size(); ++u) {
    auto& ids = sorted_ids_[u];
    ids.reserve(adjacency_[u].size());
    for (const auto& nb : adjacency_[u]) ids.push_back(nb.index);
    std::sort(ids.begin(), ids.end());
  }
}

bool SimilarityGraph::has_neighbor(std::size_t u, std::size_t v) const {
  const auto& ids = sorted_ids_[u];
  return std::binary_search(ids.begin(), ids.end(), v);
}

SimilarityGraph knn_graph(const DistanceMatrix& dm, std::size_t k, WeightFn weight) {
  if (k == 0) throw ParameterError("neighbor count must be >= 1");
  const std::size_t n = dm.size();
  const std::size_t kk = std::min(k, n - 1);
  std::vector<std::vector<Neighbor>> adjacency(n);
  std::vector<double> block;
  std::vector<std::size_t> idx;
  const std::size_t step = dm.row_block();
  for (std::size_t first = 0; first < n; first += step) {
    dm.rows(first, step, block);
    for (std::size_t u = first; u < std::min(n, first + step); ++u) {
      const double* row = block.data() + (u - first) * n;
      idx.resize(n - 1);
      std::size_t w = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != u) idx[w++] = j;
      auto closer = [row](std::size_t a, std::size_t b) {
        return row[a] != row[b] ? row[a] < row[b] : a < b;
      };
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(),
                        closer);
      auto& list = adjacency[u];
      list.reserve(kk);
      for (std::size_t r = 0; r < kk; ++r) list.push_back({idx[r], weight(row[idx[r]])});
    }
  }
  return SimilarityGraph(k, std::move(adjacency));
}

std::vector<Edge> prune_to_endpoint_max(std::span<const Edge> candidates) {
  // endpoint -> position of its best candidate
  std::unordered_map<std::size_t, std::size_t> best;
  best.reserve(candidates.size() * 2);
  auto consider = [&](std::size_t endpoint, std::size_t partner, std::size_t e) {
    auto [it, inserted] = best.try_emplace(endpoint, e);
    if (inserted) return;
    const Edge& cur = candidates[it->second];
    const std::size_t cur_partner = cur.u == endpoint ? cur.v : cur.u;
    const double w = candidates[e].weight;
    if (w > cur.weight || (w == cur.weight && partner < cur_partner)) it->second = e;
  };
  for (std::size_t e = 0; e < candidates.size(); ++e) {
    consider(candidates[e].u, candidates[e].v, e);
    consider(candidates[e].v, candidates[e].u, e);
  }
  std::vector<char> keep(candidates.size(), 0);
  for (const auto& [endpoint, e] : best) keep[e] = 1;

  std::vector<Edge> out;
  for (std::size_t e = 0; e < candidates.size(); ++e)
    if (keep[e]) out.push_back(candidates[e]);
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return out;
}

std::vector<Edge> mutual_cross_edges(const SimilarityGraph& graph, const Labeling& labeling,
                                     ClusterId ci, ClusterId cj) {
  if (ci == cj) throw ParameterError("mutual_cross_edges requires two distinct clusters");
  std::vector<Edge> candidates;
  for (std::size_t u = 0; u < labeling.size(); ++u) {
    if (labeling.label[u] != ci) continue;
    for (const auto& nb : graph.neighbors(u)) {
      if (labeling.label[nb.index] != cj || !graph.has_neighbor(nb.index, u)) continue;
      candidates.push_back({std::min(u, nb.index), std::max(u, nb.index), nb.weight});
    }
  }
  return prune_to_endpoint_max(candidates);
}

std::vector<Edge> mutual_candidates_between(const SimilarityGraph& graph,
                                            std::span<const std::size_t> points,
                                            std::span<const ClusterId> side) {
  std::unordered_map<std::size_t, ClusterId> side_of;
  side_of.reserve(points.size() * 2);
  for (std::size_t k = 0; k < points.size(); ++k) side_of.emplace(points[k], side[k]);

  std::vector<Edge> candidates;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::size_t u = points[k];
    for (const auto& nb : graph.neighbors(u)) {
      if (nb.index < u) continue;  // each unordered pair once
      auto it = side_of.find(nb.index);
      if (it == side_of.end() || it->second == side[k]) continue;
      if (!graph.has_neighbor(nb.index, u)) continue;
      candidates.push_back({u, nb.index, nb.weight});
    }
  }
  return candidates;
}

EdgeAggregate aggregate(std::span<const Edge> edges) {
  EdgeAggregate agg;
  for (const auto& e : edges) agg.total_weight += e.weight;
  agg.edge_count = edges.size();
  agg.mean_weight = agg.edge_count ? agg.total_weight / static_cast<double>(agg.edge_count) : 0.0;
  return agg;
}

EdgeAggregate internal_aggregate(std::span<const std::size_t> members,
                                 const SimilarityGraph& graph, const Labeling& bisection) {
  if (bisection.size() != members.size())
    throw std::invalid_argument("internal_aggregate: bisection not aligned with members");
  auto candidates = mutual_candidates_between(graph, members, bisection.label);
  auto kept = prune_to_endpoint_max(candidates);
  return aggregate(kept);
}

}  // namespace ecfsfdp
