#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ecfsfdp/dataset.hpp"
#include "ecfsfdp/density.hpp"

namespace ecfsfdp {

/// Cluster centers, sorted ascending and free of duplicates.
class CenterSet {
 public:
  enum class Provenance { kManual, kAuto };

  /// Throws ParameterError on an empty set, duplicates, or an index >= n.
  CenterSet(std::vector<std::size_t> centers, std::size_t n,
            Provenance provenance = Provenance::kManual);

  const std::vector<std::size_t>& indices() const { return centers_; }
  std::size_t size() const { return centers_.size(); }
  Provenance provenance() const { return provenance_; }
  bool contains(std::size_t i) const;

 private:
  std::vector<std::size_t> centers_;
  Provenance provenance_;
};

/// Cluster assignment of every point. Ids are dense, 0-based, and numbered in
/// order of first appearance over point index.
struct Labeling {
  std::vector<ClusterId> label;
  std::size_t clusters = 0;
  /// centers[c] is the center point of cluster c, when the labeling came
  /// directly from a center set.
  std::optional<std::vector<std::size_t>> centers;
  /// Set when the density maximum was not a center and had to be attached to
  /// its nearest center.
  bool root_reassigned = false;

  std::size_t size() const { return label.size(); }
  std::vector<std::vector<std::size_t>> members() const;
};

/// Renumbers ids densely in order of first appearance. Returns the old->new
/// map (indexed by old id, -1 for unused ids).
std::vector<ClusterId> canonicalize(std::vector<ClusterId>& labels);

/// The `count` points with the largest gamma, ties by index ascending.
CenterSet select_centers_auto(const std::vector<DecisionRecord>& graph, std::size_t count);

/// Phase I center count when none is given: max(2k, number of gamma outliers
/// above mean + 3 sd), capped at n/10 but never below k.
std::size_t default_center_count(const std::vector<DecisionRecord>& graph, std::size_t k);

struct AssignStats {
  std::size_t label_writes = 0;
};

/// One pass over the density order: a center opens its own cluster, every
/// other point copies its parent's label. A density maximum that is not a
/// center joins the cluster of its nearest center.
Labeling assign(const DensityProfile& profile, const CenterSet& centers,
                const DistanceMatrix& dm, AssignStats* stats = nullptr);

/// Splits `members` into two non-empty parts by running CFSFDP on the
/// members alone: restricted density profile, top-2 gamma centers, assign.
/// The returned labeling is aligned with `members` and uses ids {0, 1}.
Labeling bisect_cluster(std::span<const std::size_t> members, const DistanceMatrix& dm,
                        double dc);

}  // namespace ecfsfdp
