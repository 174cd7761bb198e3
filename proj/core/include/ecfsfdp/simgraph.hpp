#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecfsfdp/cfsfdp.hpp"
#include "ecfsfdp/dataset.hpp"

namespace ecfsfdp {

/// Maps a distance to a similarity weight in (0, 1].
using WeightFn = double (*)(double);

inline double inverse_distance_weight(double d) { return 1.0 / (1.0 + d); }

struct Neighbor {
  std::size_t index = 0;
  double weight = 0.0;
};

/// k-nearest-neighbor graph. Each adjacency list holds min(k, n-1) entries
/// sorted by weight descending, index ascending.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  SimilarityGraph(std::size_t k, std::vector<std::vector<Neighbor>> adjacency);

  std::size_t k() const { return k_; }
  std::size_t size() const { return adjacency_.size(); }
  std::span<const Neighbor> neighbors(std::size_t u) const { return adjacency_[u]; }

  /// True iff v is among u's nearest neighbors.
  bool has_neighbor(std::size_t u, std::size_t v) const;
  bool mutual(std::size_t u, std::size_t v) const {
    return has_neighbor(u, v) && has_neighbor(v, u);
  }

 private:
  std::size_t k_ = 0;
  std::vector<std::vector<Neighbor>> adjacency_;
  // Per point, neighbor indices sorted ascending for membership tests.
  std::vector<std::vector<std::size_t>> sorted_ids_;
};

/// Builds the graph from the full distance matrix.
SimilarityGraph knn_graph(const DistanceMatrix& dm, std::size_t k,
                          WeightFn weight = &inverse_distance_weight);

/// Same neighbor lists as knn_graph(pairwise_distance(points), k), found with a
/// k-d tree instead of the matrix. Intended for low-dimensional data; the
/// metric must bound every per-axis coordinate difference (Minkowski metrics do).
SimilarityGraph knn_graph_kdtree(const PointSet& points, std::size_t k,
                                 Metric metric = &euclidean,
                                 WeightFn weight = &inverse_distance_weight);

/// Undirected edge with u < v.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeAggregate {
  double total_weight = 0.0;
  std::size_t edge_count = 0;
  double mean_weight = 0.0;
};

/// Keeps an edge only if it is the heaviest candidate (ties: smaller partner
/// index) of at least one of its endpoints. Every endpoint's candidates must
/// all lead into the same opposite cluster. Output sorted by (u, v).
std::vector<Edge> prune_to_endpoint_max(std::span<const Edge> candidates);

/// Mutual-kNN pairs with one end in `ci` and the other in `cj`, pruned to the
/// per-endpoint maximum. Sorted by (u, v); symmetric in (ci, cj).
std::vector<Edge> mutual_cross_edges(const SimilarityGraph& graph, const Labeling& labeling,
                                     ClusterId ci, ClusterId cj);

/// All unpruned mutual-kNN candidates between points whose side labels differ,
/// restricted to `points` (indices into the graph) with side[k] for points[k].
std::vector<Edge> mutual_candidates_between(const SimilarityGraph& graph,
                                            std::span<const std::size_t> points,
                                            std::span<const ClusterId> side);

EdgeAggregate aggregate(std::span<const Edge> edges);

/// Internal edge cut of a cluster: the pruned mutual edges between the two
/// halves of its bisection.
EdgeAggregate internal_aggregate(std::span<const std::size_t> members,
                                 const SimilarityGraph& graph, const Labeling& bisection);

}  // namespace ecfsfdp
