#pragma once

#include <cstddef>
#include <vector>

#include "ecfsfdp/cfsfdp.hpp"
#include "ecfsfdp/dataset.hpp"
#include "ecfsfdp/simgraph.hpp"

namespace ecfsfdp {

/// Floor applied to the size-weighted internal denominator of RI and RC.
inline constexpr double kDenominatorFloor = 1e-12;

struct PairCriteria {
  double ri = 0.0;
  double rc = 0.0;
  double score = 0.0;
};

/// Cross edge weight total over the size-weighted internal totals.
double relative_interconnectivity(const EdgeAggregate& cross, const EdgeAggregate& inner_i,
                                  const EdgeAggregate& inner_j, std::size_t size_i,
                                  std::size_t size_j);

/// Cross mean edge weight over the size-weighted internal means.
double relative_closeness(const EdgeAggregate& cross, const EdgeAggregate& inner_i,
                          const EdgeAggregate& inner_j, std::size_t size_i, std::size_t size_j);

/// ri * rc^beta; zero when rc is zero.
double pair_score(double ri, double rc, double beta);

PairCriteria pair_criteria(const EdgeAggregate& cross, const EdgeAggregate& inner_i,
                           const EdgeAggregate& inner_j, std::size_t size_i, std::size_t size_j,
                           double beta);

struct Termination {
  enum class Mode { kTargetCount, kThresholds };
  Mode mode = Mode::kTargetCount;
  std::size_t k = 1;
  double t_ri = 0.0;
  double t_rc = 0.0;

  static Termination target_count(std::size_t k) { return {Mode::kTargetCount, k, 0.0, 0.0}; }
  static Termination thresholds(double t_ri, double t_rc) {
    return {Mode::kThresholds, 1, t_ri, t_rc};
  }
};

/// One merge. Initial clusters carry ids 0..m-1; step t creates id m + t.
struct MergeStep {
  ClusterId a = 0;  ///< smaller id of the merged pair
  ClusterId b = 0;
  double ri = 0.0;
  double rc = 0.0;
  double score = 0.0;
  ClusterId merged = 0;
  std::size_t clusters_after = 0;
  /// True when no connected pair was left and the closest pair was merged.
  bool fallback = false;
};

struct MergeTrace {
  std::vector<MergeStep> steps;
  Labeling initial;
  Labeling final;
};

struct MergeParams {
  double dc = 0.0;  ///< density cutoff reused for every bisection
  double beta = 1.0;
  Termination termination;
};

/// Agglomerates the initial clusters, always merging the live pair with the
/// highest score (ties: smallest (min id, max id)). Internal edge cuts come
/// from bisecting each cluster. Throws ParameterError if a target count
/// exceeds the initial cluster count.
MergeTrace merge_loop(const Labeling& initial, const SimilarityGraph& graph,
                      const DistanceMatrix& dm, const MergeParams& params);

/// Canonical labels after replaying the first `steps` merges of the trace.
std::vector<ClusterId> labels_after(const MergeTrace& trace, std::size_t steps);

}  // namespace ecfsfdp
