#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecfsfdp/dataset.hpp"

namespace ecfsfdp {

/// Counts of (truth cluster, predicted cluster) co-occurrences. Both label
/// sets are renumbered densely in order of first appearance.
struct Contingency {
  std::vector<std::vector<std::size_t>> counts;  // [truth][predicted]
  std::size_t n = 0;

  std::size_t truth_clusters() const { return counts.size(); }
  std::size_t predicted_clusters() const { return counts.empty() ? 0 : counts[0].size(); }
};

Contingency contingency(std::span<const ClusterId> truth, std::span<const ClusterId> predicted);

/// Fraction of points on the diagonal under the best one-to-one matching of
/// predicted to truth clusters (Hungarian algorithm on the contingency table).
double matched_accuracy(const Contingency& table);

/// Adjusted Rand index from pair counts. Two single-cluster labelings are
/// defined as a perfect match (1.0).
double adjusted_rand_index(const Contingency& table);

struct EvalReport {
  double accuracy = 0.0;
  double ari = 0.0;
  std::size_t clusters_found = 0;
  std::size_t clusters_expected = 0;
  Contingency table;
};

/// Throws ParameterError when the label sequences differ in length.
EvalReport evaluate(std::span<const ClusterId> predicted, std::span<const ClusterId> truth);

}  // namespace ecfsfdp
