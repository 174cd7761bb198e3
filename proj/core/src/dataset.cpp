#include "ecfsfdp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ecfsfdp {

PointSet::PointSet(std::vector<double> coords, std::size_t dim,
                   std::optional<std::vector<ClusterId>> truth)
    : coords_(std::move(coords)), dim_(dim), truth_(std::move(truth)) {
  if (dim_ == 0) throw std::invalid_argument("PointSet: dimension must be >= 1");
  if (coords_.size() % dim_ != 0)
    throw std::invalid_argument("PointSet: coordinate count is not a multiple of dim");
  n_ = coords_.size() / dim_;
  if (n_ == 0) throw std::invalid_argument("PointSet: at least one point required");
  if (truth_ && truth_->size() != n_)
    throw std::invalid_argument("PointSet: truth label count differs from point count");
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows,
                             std::optional<std::vector<ClusterId>> truth) {
  if (rows.empty()) throw std::invalid_argument("PointSet: at least one point required");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw std::invalid_argument("PointSet: inconsistent dimension");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointSet(std::move(coords), dim, std::move(truth));
}

const std::vector<ClusterId>& PointSet::truth() const {
  if (!truth_) throw std::logic_error("PointSet has no truth labels");
  return *truth_;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, Delimiter delim) {
  std::vector<std::string_view> fields;
  auto is_sep = [delim](char c) {
    const bool ws = c == ' ' || c == '\t' || c == '\r';
    switch (delim) {
      case Delimiter::kComma: return c == ',';
      case Delimiter::kWhitespace: return ws;
      case Delimiter::kAuto: return ws || c == ',' || c == ';';
    }
    return false;
  };
  if (delim == Delimiter::kComma) {
    std::size_t start = 0;
    while (true) {
      auto pos = line.find(',', start);
      auto f = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
      while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
      while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
        f.remove_suffix(1);
      fields.push_back(f);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

PointSet parse_points(std::string_view text, const LoadOptions& options) {
  std::vector<double> coords;
  std::vector<ClusterId> labels;
  std::size_t dim = 0;
  std::size_t row = 0;
  std::size_t rows_read = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++row;
    if (row == 1 && options.header) continue;
    if (blank(line)) continue;

    auto fields = split_fields(line, options.delimiter);
    const auto width = static_cast<int>(fields.size());
    std::optional<std::size_t> label_idx;
    if (options.label_column) {
      int c = *options.label_column;
      if (c < 0) c += width;
      if (c < 0 || c >= width)
        throw DataError("row " + std::to_string(row) + ": label column out of range");
      label_idx = static_cast<std::size_t>(c);
    }
    const std::size_t row_dim = fields.size() - (label_idx ? 1 : 0);
    if (row_dim == 0)
      throw DataError("row " + std::to_string(row) + ": no coordinate fields");
    if (dim == 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      throw DataError("row " + std::to_string(row) + ": inconsistent dimension (expected " +
                      std::to_string(dim) + ", got " + std::to_string(row_dim) + ")");
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      double v = 0;
      if (!parse_double(fields[f], v))
        throw DataError("row " + std::to_string(row) + ": malformed field '" +
                        std::string(fields[f]) + "'");
      if (label_idx && f == *label_idx) {
        if (v != std::floor(v) || std::abs(v) > std::numeric_limits<ClusterId>::max())
          throw DataError("row " + std::to_string(row) + ": label is not an integer");
        labels.push_back(static_cast<ClusterId>(v));
      } else {
        coords.push_back(v);
      }
    }
    ++rows_read;
  }
  if (rows_read == 0) throw DataError("input contains no data rows");
  std::optional<std::vector<ClusterId>> truth;
  if (options.label_column) truth = std::move(labels);
  return PointSet(std::move(coords), dim, std::move(truth));
}

PointSet load_points(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_points(ss.str(), options);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), condensed_(n * (n - (n > 0)) / 2) {}

void DistanceMatrix::row(std::size_t i, std::vector<double>& out) const {
  out.resize(n_);
  for (std::size_t j = 0; j < i; ++j) out[j] = condensed_[offset(j, i)];
  out[i] = 0.0;
  auto upper = upper_row(i);
  std::copy(upper.begin(), upper.end(), out.begin() + static_cast<std::ptrdiff_t>(i + 1));
}

void DistanceMatrix::rows(std::size_t first, std::size_t count, std::vector<double>& out) const {
  count = first < n_ ? std::min(count, n_ - first) : 0;
  out.assign(count * n_, 0.0);
  // d(i, j) for j < i lives in row j's upper part, where rows of the block are
  // adjacent.
  for (std::size_t j = 0; j + 1 < first + count; ++j) {
    const std::size_t r0 = j < first ? 0 : j - first + 1;
    const double* src = condensed_.data() + offset(j, first + r0);
    for (std::size_t r = r0; r < count; ++r) out[r * n_ + j] = src[r - r0];
  }
  for (std::size_t r = 0; r < count; ++r) {
    auto upper = upper_row(first + r);
    std::copy(upper.begin(), upper.end(),
              out.begin() + static_cast<std::ptrdiff_t>(r * n_ + first + r + 1));
  }
}

std::size_t DistanceMatrix::row_block() const {
  return std::clamp<std::size_t>((std::size_t{1} << 19) / std::max<std::size_t>(n_, 1), 1, 256);
}

DistanceMatrix pairwise_distance(const PointSet& points, Metric metric) {
  const std::size_t n = points.size();
  DistanceMatrix dm(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto pi = points.point(i);
    for (std::size_t j = i + 1; j < n; ++j) dm.set(i, j, metric(pi, points.point(j)));
  }
  return dm;
}

void DcSpec::validate() const {
  if (!std::isfinite(value)) throw ParameterError("d_c value must be finite");
  if (mode == Mode::kAbsolute) {
    if (value <= 0) throw ParameterError("absolute d_c must be > 0");
  } else if (value <= 0 || value > 100) {
    throw ParameterError("d_c percentage must be in (0, 100]");
  }
}

std::size_t percent_target(double percent, std::size_t n) {
  const double raw = percent * static_cast<double>(n) / 100.0;
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

namespace {

double above(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

double resolve_max_rho(const DistanceMatrix& dm, double pct) {
  const std::size_t n = dm.size();
  const std::size_t target = std::max<std::size_t>(1, percent_target(pct, n));
  if (target > n - 1)
    throw ParameterError("d_c target max rho >= " + std::to_string(target) +
                         " is unreachable; the largest achievable max rho is " +
                         std::to_string(n - 1));
  // rho_i(dc) >= t  iff  the t-th smallest distance from i is < dc.
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> block;
  const std::size_t step = dm.row_block();
  for (std::size_t first = 0; first < n; first += step) {
    dm.rows(first, step, block);
    for (std::size_t r = 0; r * n < block.size(); ++r) {
      auto row = block.begin() + static_cast<std::ptrdiff_t>(r * n);
      // drop the self-distance by swapping it to the end
      std::iter_swap(row + static_cast<std::ptrdiff_t>(first + r), row + static_cast<std::ptrdiff_t>(n - 1));
      auto nth = row + static_cast<std::ptrdiff_t>(target - 1);
      std::nth_element(row, nth, row + static_cast<std::ptrdiff_t>(n - 1));
      best = std::min(best, *nth);
    }
  }
  return above(best);
}

double resolve_avg_neighbor(const DistanceMatrix& dm, double pct) {
  const std::size_t n = dm.size();
  // mean rho >= pct/100 * n  <=>  unordered pairs closer than dc >= pct * n^2 / 200.
  const double raw = pct * static_cast<double>(n) * static_cast<double>(n) / 200.0;
  const auto pairs = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  const std::size_t total = n * (n - 1) / 2;
  if (pairs > total) {
    throw ParameterError("d_c target mean rho >= " + std::to_string(pct / 100.0 * n) +
                         " is unreachable; the largest achievable mean rho is " +
                         std::to_string(n - 1));
  }
  if (pairs == 0) {
    // Any positive cutoff satisfies a zero target; use the smallest candidate.
    auto all = dm.condensed();
    return above(*std::min_element(all.begin(), all.end()));
  }
  std::vector<double> all(dm.condensed().begin(), dm.condensed().end());
  auto nth = all.begin() + static_cast<std::ptrdiff_t>(pairs - 1);
  std::nth_element(all.begin(), nth, all.end());
  return above(*nth);
}

}  // namespace

double resolve_dc(const DistanceMatrix& dm, const DcSpec& spec) {
  spec.validate();
  if (spec.mode == DcSpec::Mode::kAbsolute) return spec.value;
  if (dm.size() < 2) throw ParameterError("percentage d_c requires at least 2 points");
  return spec.mode == DcSpec::Mode::kMaxRhoPercent ? resolve_max_rho(dm, spec.value)
                                                   : resolve_avg_neighbor(dm, spec.value);
}

}  // namespace ecfsfdp
