#include "ecfsfdp/evaluate.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace ecfsfdp {

namespace {

std::vector<std::size_t> dense_ids(std::span<const ClusterId> labels, std::size_t& count) {
  std::unordered_map<ClusterId, std::size_t> ids;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], ids.size());
    out[i] = it->second;
  }
  count = ids.size();
  return out;
}

// Minimum-cost assignment of rows to columns for a rows <= cols cost matrix
// (shortest augmenting path with potentials). Returns the column of each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);  // 1-based rows
  for (std::size_t i = 1; i <= rows; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

Contingency contingency(std::span<const ClusterId> truth, std::span<const ClusterId> predicted) {
  if (truth.size() != predicted.size())
    throw ParameterError("label sequences differ in length (" + std::to_string(truth.size()) +
                         " vs " + std::to_string(predicted.size()) + ")");
  std::size_t kt = 0, kp = 0;
  const auto t = dense_ids(truth, kt);
  const auto p = dense_ids(predicted, kp);
  Contingency table;
  table.n = truth.size();
  table.counts.assign(kt, std::vector<std::size_t>(kp, 0));
  for (std::size_t i = 0; i < t.size(); ++i) ++table.counts[t[i]][p[i]];
  return table;
}

double matched_accuracy(const Contingency& table) {
  if (table.n == 0) return 0.0;
  const std::size_t kt = table.truth_clusters();
  const std::size_t kp = table.predicted_clusters();
  // Square the problem so the smaller side is the rows.
  const bool truth_rows = kt <= kp;
  const std::size_t rows = truth_rows ? kt : kp;
  const std::size_t cols = truth_rows ? kp : kt;
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols, 0.0));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      cost[r][c] = -static_cast<double>(truth_rows ? table.counts[r][c] : table.counts[c][r]);
  const auto pick = hungarian(cost);
  std::size_t matched = 0;
  for (std::size_t r = 0; r < rows; ++r)
    matched += truth_rows ? table.counts[r][pick[r]] : table.counts[pick[r]][r];
  return static_cast<double>(matched) / static_cast<double>(table.n);
}

double adjusted_rand_index(const Contingency& table) {
  const std::size_t kt = table.truth_clusters();
  const std::size_t kp = table.predicted_clusters();
  double sum_cells = 0.0;
  std::vector<double> rows(kt, 0.0), cols(kp, 0.0);
  for (std::size_t r = 0; r < kt; ++r) {
    for (std::size_t c = 0; c < kp; ++c) {
      const auto x = static_cast<double>(table.counts[r][c]);
      sum_cells += choose2(x);
      rows[r] += x;
      cols[c] += x;
    }
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (double x : rows) sum_rows += choose2(x);
  for (double x : cols) sum_cols += choose2(x);
  const double total = choose2(static_cast<double>(table.n));
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

EvalReport evaluate(std::span<const ClusterId> predicted, std::span<const ClusterId> truth) {
  EvalReport report;
  report.table = contingency(truth, predicted);
  report.accuracy = matched_accuracy(report.table);
  report.ari = adjusted_rand_index(report.table);
  report.clusters_found = report.table.predicted_clusters();
  report.clusters_expected = report.table.truth_clusters();
  return report;
}

}  // namespace ecfsfdp
