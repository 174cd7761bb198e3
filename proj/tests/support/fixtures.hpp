#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ecfsfdp/cfsfdp.hpp"
#include "ecfsfdp/dataset.hpp"

namespace fixtures {

using Rows = std::vector<std::vector<double>>;

/// Gaussian blobs with random centers. With `grid` > 0 every coordinate is
/// rounded to a multiple of it, which produces plenty of tied distances.
inline Rows random_blobs(std::uint64_t seed, std::size_t n, std::size_t blobs, double grid = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> where(0.0, 20.0);
  std::uniform_real_distribution<double> spread(0.5, 2.0);
  Rows centers;
  std::vector<double> sd;
  for (std::size_t b = 0; b < blobs; ++b) {
    centers.push_back({where(rng), where(rng)});
    sd.push_back(spread(rng));
  }
  std::normal_distribution<double> unit(0.0, 1.0);
  Rows out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = i % blobs;
    double x = centers[b][0] + sd[b] * unit(rng);
    double y = centers[b][1] + sd[b] * unit(rng);
    if (grid > 0) {
      x = std::round(x / grid) * grid;
      y = std::round(y / grid) * grid;
    }
    out.push_back({x, y});
  }
  return out;
}

/// Two 5-point blobs, points 0-4 around (0,0) and 5-9 around (10,0).
inline Rows dumbbell() {
  return {{0, 0},  {1, 0},  {0, 1},  {-1, 0},  {0, -1},
          {10, 0}, {11, 0}, {10, 1}, {9.2, 0}, {10, -1}};
}

/// Points on the x axis.
inline Rows line(std::initializer_list<double> xs) {
  Rows out;
  for (double x : xs) out.push_back({x, 0.0});
  return out;
}

inline std::vector<int> as_int(const std::vector<ecfsfdp::ClusterId>& v) {
  return {v.begin(), v.end()};
}

}  // namespace fixtures
