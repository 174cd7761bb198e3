#include "ecfsfdp/density.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ecfsfdp {

std::vector<std::uint32_t> local_density(const DistanceMatrix& dm, double dc) {
  const std::size_t n = dm.size();
  std::vector<std::uint32_t> rho(n, 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto row = dm.upper_row(i);
    std::uint32_t count = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] < dc) {
        ++count;
        ++rho[i + 1 + k];
      }
    }
    rho[i] += count;
  }
  return rho;
}

std::vector<std::size_t> density_order(const std::vector<std::uint32_t>& rho) {
  std::vector<std::size_t> order(rho.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&rho](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });
  return order;
}

DeltaResult delta_and_parent(const DistanceMatrix& dm, const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  DeltaResult out{std::vector<double>(n, 0.0), std::vector<std::size_t>(n, kNoParent)};
  if (n == 0) return out;

  const std::size_t first = order.front();
  double far = 0.0;
  for (std::size_t j = 0; j < n; ++j) far = std::max(far, dm(first, j));
  out.delta[first] = far;

  // One pass over the upper triangle in storage order. Each pair offers the
  // later point (in `order`) a candidate parent; ties go to the earlier position.
  std::vector<std::size_t> pos(n);
  for (std::size_t p = 0; p < n; ++p) pos[order[p]] = p;
  std::vector<std::size_t> best_pos(n, kNoParent);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  auto offer = [&](std::size_t i, std::size_t p, double d) {
    if (d < best[i] || (d == best[i] && p < best_pos[i])) {
      best[i] = d;
      best_pos[i] = p;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dm.upper_row(i);
    const std::size_t pi = pos[i];
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::size_t j = i + 1 + k;
      if (pos[j] < pi)
        offer(i, pos[j], row[k]);
      else
        offer(j, pi, row[k]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == first) continue;
    out.delta[i] = best[i];
    out.parent[i] = order[best_pos[i]];
  }
  return out;
}

DensityProfile compute_profile(const DistanceMatrix& dm, double dc) {
  DensityProfile p;
  p.rho = local_density(dm, dc);
  p.order = density_order(p.rho);
  auto dp = delta_and_parent(dm, p.order);
  p.delta = std::move(dp.delta);
  p.parent = std::move(dp.parent);
  return p;
}

namespace {

template <typename T>
std::vector<double> min_max_scale(const std::vector<T>& v) {
  std::vector<double> out(v.size(), 0.0);
  if (v.empty()) return out;
  auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = static_cast<double>(*lo_it);
  const double hi = static_cast<double>(*hi_it);
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = (static_cast<double>(v[i]) - lo) / (hi - lo);
  return out;
}

}  // namespace

std::vector<DecisionRecord> decision_graph(const std::vector<std::uint32_t>& rho,
                                           const std::vector<double>& delta) {
  if (rho.size() != delta.size())
    throw std::invalid_argument("decision_graph: rho and delta differ in length");
  const auto nr = min_max_scale(rho);
  const auto nd = min_max_scale(delta);
  std::vector<DecisionRecord> records(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i)
    records[i] = DecisionRecord{i, rho[i], delta[i], nr[i] * nd[i]};
  return records;
}

std::vector<DecisionRecord> sorted_by_gamma(std::vector<DecisionRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const DecisionRecord& a, const DecisionRecord& b) {
                     if (a.gamma != b.gamma) return a.gamma > b.gamma;
                     return a.index < b.index;
                   });
  return records;
}

}  // namespace ecfsfdp
