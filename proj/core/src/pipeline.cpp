#include "ecfsfdp/pipeline.hpp"

#include <chrono>

namespace ecfsfdp {

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// The k-d tree path yields the same lists as the matrix path; it only pays off
// in low dimension.
constexpr std::size_t kKdTreeMaxDim = 3;

}  // namespace

Session::Session(PointSet points, Metric metric) : points_(std::move(points)), metric_(metric) {
  Stopwatch sw;
  dm_ = pairwise_distance(points_, metric_);
  distance_seconds_ = sw.lap();
}

const DensityProfile& Session::profile(double dc) {
  if (!cached_dc_ || *cached_dc_ != dc) {
    cached_profile_ = compute_profile(dm_, dc);
    cached_dc_ = dc;
  }
  return cached_profile_;
}

PhaseOne Session::phase_one(double dc, const CenterChoice& choice, std::size_t k_hint,
                            Timings* timings) {
  Stopwatch sw;
  const auto& prof = profile(dc);
  const double density_s = sw.lap();

  std::optional<CenterSet> centers;
  if (choice.manual) {
    centers.emplace(*choice.manual, points_.size(), CenterSet::Provenance::kManual);
  } else {
    const auto graph = decision_graph(prof);
    const std::size_t count =
        choice.auto_count ? *choice.auto_count : default_center_count(graph, k_hint);
    centers.emplace(select_centers_auto(graph, count));
  }
  auto labeling = assign(prof, *centers, dm_);
  if (timings) {
    timings->density = density_s;
    timings->assign = sw.lap();
  }
  return PhaseOne{dc, std::move(labeling)};
}

SimilarityGraph Session::graph(std::size_t n_neighbor) const {
  if (points_.dim() <= kKdTreeMaxDim) return knn_graph_kdtree(points_, n_neighbor, metric_);
  return knn_graph(dm_, n_neighbor);
}

RunResult Session::run(const RunParams& params) {
  if (params.n_neighbor == 0) throw ParameterError("n_neighbor must be >= 1");
  if (!(params.beta > 0.0)) throw ParameterError("beta must be > 0");
  RunResult result;
  result.timings.distances = distance_seconds_;

  Stopwatch sw;
  const double dc = resolve(params.dc);
  result.timings.resolve_dc = sw.lap();

  const std::size_t k_hint =
      params.termination.mode == Termination::Mode::kTargetCount ? params.termination.k : 1;
  result.phase_one = phase_one(dc, params.centers, k_hint, &result.timings);
  sw.lap();

  const auto g = graph(params.n_neighbor);
  result.timings.graph = sw.lap();

  MergeParams mp;
  mp.dc = dc;
  mp.beta = params.beta;
  mp.termination = params.termination;
  result.trace = merge_loop(result.phase_one.labeling, g, dm_, mp);
  result.timings.merge = sw.lap();
  return result;
}

}  // namespace ecfsfdp
