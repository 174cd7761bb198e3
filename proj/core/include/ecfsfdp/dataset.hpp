#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecfsfdp {

/// Raised for unreadable or malformed input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a requested parameter cannot be satisfied by the data,
/// e.g. a d_c percentage no cutoff can reach.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using ClusterId = std::int32_t;

/// Points stored row-major in a single buffer, with optional ground truth.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::vector<double> coords, std::size_t dim,
           std::optional<std::vector<ClusterId>> truth = std::nullopt);

  /// Convenience for small fixtures and tests.
  static PointSet from_rows(const std::vector<std::vector<double>>& rows,
                            std::optional<std::vector<ClusterId>> truth = std::nullopt);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const { return coords_; }

  bool has_truth() const { return truth_.has_value(); }
  const std::vector<ClusterId>& truth() const;

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::optional<std::vector<ClusterId>> truth_;
};

enum class Delimiter { kAuto, kComma, kWhitespace };

struct LoadOptions {
  Delimiter delimiter = Delimiter::kAuto;
  bool header = false;
  /// Column holding an integer label. Negative values count from the end
  /// (-1 is the last column).
  std::optional<int> label_column;
};

/// Parses delimiter-separated numeric text, one point per row. Blank lines are
/// skipped. Errors name the 1-based row number of the offending line.
PointSet load_points(const std::filesystem::path& path, const LoadOptions& options = {});
PointSet parse_points(std::string_view text, const LoadOptions& options = {});

/// Distance between two coordinate vectors of equal length.
using Metric = double (*)(std::span<const double>, std::span<const double>);

double euclidean(std::span<const double> a, std::span<const double> b);

/// Symmetric distance matrix with zero diagonal, stored as the condensed upper
/// triangle (n(n-1)/2 entries, row-major over i < j).
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n);

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return i < j ? condensed_[offset(i, j)] : condensed_[offset(j, i)];
  }
  void set(std::size_t i, std::size_t j, double value) {
    condensed_[i < j ? offset(i, j) : offset(j, i)] = value;
  }

  /// All off-diagonal distances, each unordered pair once.
  std::span<const double> condensed() const { return condensed_; }

  /// Distances d(i, j) for j > i, contiguous.
  std::span<const double> upper_row(std::size_t i) const {
    if (i + 1 >= n_) return {};
    return {condensed_.data() + offset(i, i + 1), n_ - i - 1};
  }

  /// Copies row i (including the zero self-distance) into out.
  void row(std::size_t i, std::vector<double>& out) const;

  /// Copies rows first .. first+count-1 into out, row-major (count x size()).
  /// Much faster than repeated row() calls: the lower-triangle part is read in
  /// contiguous runs instead of one element per stored row.
  void rows(std::size_t first, std::size_t count, std::vector<double>& out) const;

  /// Rows per rows() call that keep the buffer around a few MB.
  std::size_t row_block() const;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    // i < j
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> condensed_;
};

DistanceMatrix pairwise_distance(const PointSet& points, Metric metric = &euclidean);

/// How the density cutoff d_c is chosen.
struct DcSpec {
  enum class Mode {
    kMaxRhoPercent,       ///< max_i rho_i reaches value% of n
    kAvgNeighborPercent,  ///< mean_i rho_i reaches value% of n
    kAbsolute,            ///< value is d_c itself
  };
  Mode mode = Mode::kMaxRhoPercent;
  double value = 2.0;

  static DcSpec max_rho_percent(double pct) { return {Mode::kMaxRhoPercent, pct}; }
  static DcSpec avg_neighbor_percent(double pct) { return {Mode::kAvgNeighborPercent, pct}; }
  static DcSpec absolute(double dc) { return {Mode::kAbsolute, dc}; }

  /// Throws ParameterError if value is out of range for the mode.
  void validate() const;
};

/// Converts a percentage of n to a count target, rounding up.
std::size_t percent_target(double percent, std::size_t n);

/// Smallest d_c candidate meeting the target of `spec`. Candidates are the values
/// just above each off-diagonal distance, since density counts d < d_c.
/// Throws ParameterError if the target cannot be reached.
double resolve_dc(const DistanceMatrix& dm, const DcSpec& spec);

}  // namespace ecfsfdp
