#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ecfsfdp/cfsfdp.hpp"
#include "ecfsfdp/dataset.hpp"
#include "ecfsfdp/density.hpp"
#include "ecfsfdp/merge.hpp"
#include "ecfsfdp/simgraph.hpp"

namespace ecfsfdp {

/// How Phase I picks its centers. With neither field set the count comes from
/// default_center_count().
struct CenterChoice {
  std::optional<std::vector<std::size_t>> manual;
  std::optional<std::size_t> auto_count;
};

struct RunParams {
  DcSpec dc = DcSpec::max_rho_percent(2.0);
  std::size_t n_neighbor = 10;
  double beta = 2.0;
  Termination termination = Termination::target_count(2);
  CenterChoice centers;
};

struct PhaseOne {
  double dc = 0.0;
  /// labeling.centers holds the chosen centers, aligned with cluster ids.
  Labeling labeling;
};

/// Wall time per phase, in seconds.
struct Timings {
  double distances = 0.0;
  double resolve_dc = 0.0;
  double density = 0.0;
  double assign = 0.0;
  double graph = 0.0;
  double merge = 0.0;
};

struct RunResult {
  PhaseOne phase_one;
  MergeTrace trace;
  Timings timings;
};

/// Owns a point set and its distance matrix, and caches the density profile
/// of the most recent cutoff. Not thread-safe; callers serialize access.
class Session {
 public:
  explicit Session(PointSet points, Metric metric = &euclidean);

  const PointSet& points() const { return points_; }
  const DistanceMatrix& distances() const { return dm_; }
  double distance_seconds() const { return distance_seconds_; }

  double resolve(const DcSpec& spec) const { return resolve_dc(dm_, spec); }
  const DensityProfile& profile(double dc);
  std::vector<DecisionRecord> decision(double dc) { return decision_graph(profile(dc)); }

  /// Centers and initial labeling. `k_hint` feeds the default center count.
  PhaseOne phase_one(double dc, const CenterChoice& choice, std::size_t k_hint,
                     Timings* timings = nullptr);

  SimilarityGraph graph(std::size_t n_neighbor) const;

  RunResult run(const RunParams& params);

 private:
  PointSet points_;
  Metric metric_;
  DistanceMatrix dm_;
  double distance_seconds_ = 0.0;
  std::optional<double> cached_dc_;
  DensityProfile cached_profile_;
};

}  // namespace ecfsfdp
