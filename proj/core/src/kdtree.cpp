// k-d tree backed kNN graph construction for low-dimensional inputs.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "ecfsfdp/simgraph.hpp"

namespace ecfsfdp {
namespace {

struct Node {
  std::size_t begin = 0;  // range into the permuted index array
  std::size_t end = 0;
  std::size_t axis = 0;
  double split = 0.0;
  std::int64_t left = -1;
  std::int64_t right = -1;
};

constexpr std::size_t kLeafSize = 16;

class KdTree {
 public:
  explicit KdTree(const PointSet& points) : points_(points), index_(points.size()) {
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    build(0, index_.size());
  }

  // Candidate ordering: (distance, index) ascending, the same key the matrix
  // path uses, so both produce identical neighbor lists.
  struct Candidate {
    double dist;
    std::size_t index;
    bool operator<(const Candidate& o) const {
      return dist != o.dist ? dist < o.dist : index < o.index;
    }
  };

  void query(std::size_t self, std::size_t k, Metric metric, std::vector<Candidate>& out) const {
    std::priority_queue<Candidate> heap;  // max-heap of the current best k
    search(0, self, k, metric, heap);
    out.clear();
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
  }

 private:
  std::int64_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    const std::size_t dim = points_.dim();
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      double lo = points_.point(index_[begin])[a], hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = points_.point(index_[i])[a];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = a;
      }
    }
    if (widest <= 0.0) return id;  // all coincident on every axis: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    auto first = index_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return points_.point(a)[axis] < points_.point(b)[axis];
                     });
    const double split = points_.point(index_[mid])[axis];
    nodes_[static_cast<std::size_t>(id)].axis = axis;
    nodes_[static_cast<std::size_t>(id)].split = split;
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  void search(std::int64_t node_id, std::size_t self, std::size_t k, Metric metric,
              std::priority_queue<Candidate>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    auto q = points_.point(self);
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t j = index_[i];
        if (j == self) continue;
        // Same argument order as pairwise_distance (lower index first).
        const double d = self < j ? metric(q, points_.point(j)) : metric(points_.point(j), q);
        Candidate c{d, j};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const auto near = diff < 0 ? node.left : node.right;
    const auto far = diff < 0 ? node.right : node.left;
    search(near, self, k, metric, heap);
    // Ties on the k-th distance must still be visited (index breaks them), and
    // the slack absorbs rounding between |diff| and a computed sqrt.
    if (heap.size() < k || std::abs(diff) <= heap.top().dist * (1.0 + 1e-12))
      search(far, self, k, metric, heap);
  }

  const PointSet& points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace

SimilarityGraph knn_graph_kdtree(const PointSet& points, std::size_t k, Metric metric,
                                 WeightFn weight) {
  if (k == 0) throw ParameterError("neighbor count must be >= 1");
  const std::size_t n = points.size();
  const std::size_t kk = std::min(k, n - 1);
  std::vector<std::vector<Neighbor>> adjacency(n);
  if (kk == 0) return SimilarityGraph(k, std::move(adjacency));

  KdTree tree(points);
  std::vector<KdTree::Candidate> found;
  for (std::size_t u = 0; u < n; ++u) {
    tree.query(u, kk, metric, found);
    auto& list = adjacency[u];
    list.reserve(kk);
    for (const auto& c : found) list.push_back({c.index, weight(c.dist)});
  }
  return SimilarityGraph(k, std::move(adjacency));
}

}  // namespace ecfsfdp
