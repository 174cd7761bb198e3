#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ecfsfdp/dataset.hpp"

namespace ecfsfdp {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Per-point density quantities used by center selection and assignment.
struct DensityProfile {
  std::vector<std::uint32_t> rho;
  std::vector<double> delta;
  /// Nearest point earlier in `order`; kNoParent for order.front().
  std::vector<std::size_t> parent;
  /// Indices by (rho descending, index ascending).
  std::vector<std::size_t> order;

  std::size_t size() const { return rho.size(); }
};

/// rho[i] = |{ j != i : d(i, j) < dc }|.
std::vector<std::uint32_t> local_density(const DistanceMatrix& dm, double dc);

/// Total order on points: higher density first, lower index breaks ties.
std::vector<std::size_t> density_order(const std::vector<std::uint32_t>& rho);

struct DeltaResult {
  std::vector<double> delta;
  std::vector<std::size_t> parent;
};

/// For every point except order.front(): distance to the nearest point that
/// precedes it in `order` (earliest position wins ties). The first point gets
/// the distance to its farthest point and no parent; a single point gets 0.
DeltaResult delta_and_parent(const DistanceMatrix& dm, const std::vector<std::size_t>& order);

DensityProfile compute_profile(const DistanceMatrix& dm, double dc);

struct DecisionRecord {
  std::size_t index = 0;
  std::uint32_t rho = 0;
  double delta = 0.0;
  double gamma = 0.0;
};

/// One record per point, in point order. gamma is the product of rho and delta
/// each min-max scaled to [0, 1]; a constant vector scales to all zeros.
std::vector<DecisionRecord> decision_graph(const std::vector<std::uint32_t>& rho,
                                           const std::vector<double>& delta);

inline std::vector<DecisionRecord> decision_graph(const DensityProfile& profile) {
  return decision_graph(profile.rho, profile.delta);
}

/// Records ordered by gamma descending, index ascending.
std::vector<DecisionRecord> sorted_by_gamma(std::vector<DecisionRecord> records);

}  // namespace ecfsfdp
