#include "ecfsfdp/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>

namespace ecfsfdp {

namespace {

double normalized(double numerator, double inner_i, double inner_j, std::size_t size_i,
                  std::size_t size_j) {
  if (numerator == 0.0) return 0.0;
  const double total = static_cast<double>(size_i + size_j);
  const double wi = static_cast<double>(size_i) / total;
  const double wj = static_cast<double>(size_j) / total;
  const double denominator = std::max(wi * inner_i + wj * inner_j, kDenominatorFloor);
  return numerator / denominator;
}

}  // namespace

double relative_interconnectivity(const EdgeAggregate& cross, const EdgeAggregate& inner_i,
                                  const EdgeAggregate& inner_j, std::size_t size_i,
                                  std::size_t size_j) {
  return normalized(cross.total_weight, inner_i.total_weight, inner_j.total_weight, size_i,
                    size_j);
}

double relative_closeness(const EdgeAggregate& cross, const EdgeAggregate& inner_i,
                          const EdgeAggregate& inner_j, std::size_t size_i, std::size_t size_j) {
  return normalized(cross.mean_weight, inner_i.mean_weight, inner_j.mean_weight, size_i, size_j);
}

double pair_score(double ri, double rc, double beta) {
  if (rc == 0.0 || ri == 0.0) return 0.0;
  return ri * std::pow(rc, beta);
}

PairCriteria pair_criteria(const EdgeAggregate& cross, const EdgeAggregate& inner_i,
                           const EdgeAggregate& inner_j, std::size_t size_i, std::size_t size_j,
                           double beta) {
  PairCriteria c;
  c.ri = relative_interconnectivity(cross, inner_i, inner_j, size_i, size_j);
  c.rc = relative_closeness(cross, inner_i, inner_j, size_i, size_j);
  c.score = pair_score(c.ri, c.rc, beta);
  return c;
}

namespace {

struct Cluster {
  std::vector<std::size_t> members;  // ascending point indices
  EdgeAggregate inner;
  bool alive = true;
};

struct HeapEntry {
  double score;
  ClusterId lo;
  ClusterId hi;
  PairCriteria criteria;
};

// Top of the queue: highest score, then lexicographically smallest pair.
struct HeapOrder {
  bool operator()(const HeapEntry& x, const HeapEntry& y) const {
    if (x.score != y.score) return x.score < y.score;
    if (x.lo != y.lo) return x.lo > y.lo;
    return x.hi > y.hi;
  }
};

std::uint64_t pair_key(ClusterId a, ClusterId b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

class MergeEngine {
 public:
  MergeEngine(const Labeling& initial, const SimilarityGraph& graph, const DistanceMatrix& dm,
              const MergeParams& params)
      : graph_(graph), dm_(dm), params_(params), owner_(initial.label) {
    const auto groups = initial.members();
    clusters_.resize(groups.size());
    adjacent_.resize(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
      clusters_[c].members = groups[c];
      clusters_[c].inner = inner_of(clusters_[c].members);
    }

    for (std::size_t u = 0; u < graph_.size(); ++u) {
      for (const auto& nb : graph_.neighbors(u)) {
        const std::size_t v = nb.index;
        if (v < u || owner_[u] == owner_[v] || !graph_.has_neighbor(v, u)) continue;
        buckets_[pair_key(owner_[u], owner_[v])].push_back({u, v, nb.weight});
        adjacent_[static_cast<std::size_t>(owner_[u])].insert(owner_[v]);
        adjacent_[static_cast<std::size_t>(owner_[v])].insert(owner_[u]);
      }
    }
    for (const auto& [key, edges] : buckets_) {
      const auto lo = static_cast<ClusterId>(key >> 32);
      const auto hi = static_cast<ClusterId>(key & 0xffffffffu);
      consider(lo, hi);
    }
    live_ = groups.size();
  }

  std::vector<MergeStep> run() {
    std::vector<MergeStep> steps;
    const bool target = params_.termination.mode == Termination::Mode::kTargetCount;
    while (live_ > 1) {
      if (target && live_ <= params_.termination.k) break;
      auto entry = pop_live();
      if (entry) {
        steps.push_back(merge(entry->lo, entry->hi, entry->criteria, false));
        continue;
      }
      if (!target) break;
      auto [a, b] = closest_live_pair();
      steps.push_back(merge(a, b, PairCriteria{}, true));
    }
    return steps;
  }

  std::vector<ClusterId> owners() const { return owner_; }

 private:
  EdgeAggregate inner_of(const std::vector<std::size_t>& members) const {
    if (members.size() < 2) return {};
    const auto halves = bisect_cluster(members, dm_, params_.dc);
    return internal_aggregate(members, graph_, halves);
  }

  void consider(ClusterId a, ClusterId b) {
    auto it = buckets_.find(pair_key(a, b));
    if (it == buckets_.end() || it->second.empty()) return;
    const auto lo = std::min(a, b);
    const auto hi = std::max(a, b);
    const auto& ci = clusters_[static_cast<std::size_t>(lo)];
    const auto& cj = clusters_[static_cast<std::size_t>(hi)];
    const auto cross = aggregate(prune_to_endpoint_max(it->second));
    const auto crit = pair_criteria(cross, ci.inner, cj.inner, ci.members.size(),
                                    cj.members.size(), params_.beta);
    if (crit.score <= 0.0) return;
    if (params_.termination.mode == Termination::Mode::kThresholds &&
        !(crit.ri > params_.termination.t_ri && crit.rc > params_.termination.t_rc))
      return;
    heap_.push({crit.score, lo, hi, crit});
  }

  std::optional<HeapEntry> pop_live() {
    while (!heap_.empty()) {
      auto top = heap_.top();
      heap_.pop();
      if (clusters_[static_cast<std::size_t>(top.lo)].alive &&
          clusters_[static_cast<std::size_t>(top.hi)].alive)
        return top;
    }
    return std::nullopt;
  }

  std::pair<ClusterId, ClusterId> closest_live_pair() const {
    double best = std::numeric_limits<double>::infinity();
    std::pair<ClusterId, ClusterId> pick{-1, -1};
    const std::size_t n = owner_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto row = dm_.upper_row(i);
      for (std::size_t k = 0; k < row.size(); ++k) {
        const std::size_t j = i + 1 + k;
        if (owner_[i] == owner_[j]) continue;
        const auto lo = std::min(owner_[i], owner_[j]);
        const auto hi = std::max(owner_[i], owner_[j]);
        if (row[k] < best || (row[k] == best && std::pair{lo, hi} < pick)) {
          best = row[k];
          pick = {lo, hi};
        }
      }
    }
    return pick;
  }

  MergeStep merge(ClusterId a, ClusterId b, const PairCriteria& crit, bool fallback) {
    const auto c = static_cast<ClusterId>(clusters_.size());
    auto& ca = clusters_[static_cast<std::size_t>(a)];
    auto& cb = clusters_[static_cast<std::size_t>(b)];
    Cluster merged;
    merged.members.reserve(ca.members.size() + cb.members.size());
    std::merge(ca.members.begin(), ca.members.end(), cb.members.begin(), cb.members.end(),
               std::back_inserter(merged.members));
    ca.alive = false;
    cb.alive = false;
    ca.members.clear();
    ca.members.shrink_to_fit();
    cb.members.clear();
    cb.members.shrink_to_fit();
    for (auto p : merged.members) owner_[p] = c;
    merged.inner = inner_of(merged.members);
    clusters_.push_back(std::move(merged));
    adjacent_.emplace_back();

    std::set<ClusterId> touched;
    for (auto src : {a, b}) {
      for (auto x : adjacent_[static_cast<std::size_t>(src)]) {
        if (x == a || x == b) continue;
        auto it = buckets_.find(pair_key(src, x));
        if (it != buckets_.end()) {
          auto moved = std::move(it->second);
          buckets_.erase(it);
          auto& dst = buckets_[pair_key(c, x)];
          dst.insert(dst.end(), moved.begin(), moved.end());
        }
        adjacent_[static_cast<std::size_t>(x)].erase(src);
        adjacent_[static_cast<std::size_t>(x)].insert(c);
        touched.insert(x);
      }
      adjacent_[static_cast<std::size_t>(src)].clear();
    }
    buckets_.erase(pair_key(a, b));
    adjacent_[static_cast<std::size_t>(c)] = touched;
    for (auto x : touched) consider(c, x);

    --live_;
    MergeStep step;
    step.a = std::min(a, b);
    step.b = std::max(a, b);
    step.ri = crit.ri;
    step.rc = crit.rc;
    step.score = crit.score;
    step.merged = c;
    step.clusters_after = live_;
    step.fallback = fallback;
    return step;
  }

  const SimilarityGraph& graph_;
  const DistanceMatrix& dm_;
  const MergeParams& params_;
  std::vector<ClusterId> owner_;
  std::vector<Cluster> clusters_;
  std::vector<std::set<ClusterId>> adjacent_;
  std::unordered_map<std::uint64_t, std::vector<Edge>> buckets_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;
  std::size_t live_ = 0;
};

}  // namespace

MergeTrace merge_loop(const Labeling& initial, const SimilarityGraph& graph,
                      const DistanceMatrix& dm, const MergeParams& params) {
  if (initial.clusters == 0) throw ParameterError("merge_loop needs at least one cluster");
  if (graph.size() != initial.size() || dm.size() != initial.size())
    throw std::invalid_argument("merge_loop: labeling, graph and matrix sizes differ");
  if (!(params.beta > 0.0)) throw ParameterError("beta must be > 0");
  const auto& term = params.termination;
  if (term.mode == Termination::Mode::kTargetCount) {
    if (term.k == 0) throw ParameterError("target cluster count must be >= 1");
    if (term.k > initial.clusters)
      throw ParameterError("target cluster count " + std::to_string(term.k) +
                           " exceeds the " + std::to_string(initial.clusters) +
                           " initial clusters");
  } else if (term.t_ri < 0.0 || term.t_rc < 0.0) {
    throw ParameterError("merge thresholds must be >= 0");
  }

  MergeEngine engine(initial, graph, dm, params);
  MergeTrace trace;
  trace.steps = engine.run();
  trace.initial = initial;
  trace.final.label = engine.owners();
  canonicalize(trace.final.label);
  trace.final.clusters = initial.clusters - trace.steps.size();
  return trace;
}

std::vector<ClusterId> labels_after(const MergeTrace& trace, std::size_t steps) {
  if (steps > trace.steps.size())
    throw std::out_of_range("labels_after: trace has only " +
                            std::to_string(trace.steps.size()) + " steps");
  std::vector<ClusterId> labels = trace.initial.label;
  const auto m = static_cast<ClusterId>(trace.initial.clusters);
  // Resolve every id to the newest cluster that absorbed it within `steps`.
  std::vector<ClusterId> resolve(static_cast<std::size_t>(m) + steps);
  for (std::size_t id = 0; id < resolve.size(); ++id) resolve[id] = static_cast<ClusterId>(id);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto& s = trace.steps[t];
    resolve[static_cast<std::size_t>(s.a)] = s.merged;
    resolve[static_cast<std::size_t>(s.b)] = s.merged;
  }
  auto find = [&resolve](ClusterId id) {
    while (resolve[static_cast<std::size_t>(id)] != id) id = resolve[static_cast<std::size_t>(id)];
    return id;
  };
  for (auto& l : labels) l = find(l);
  canonicalize(labels);
  return labels;
}

}  // namespace ecfsfdp
