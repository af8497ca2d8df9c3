#include "tsd/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest augmenting path with potentials, rows <= cols. Returns row -> col.
std::vector<int> hungarian_wide(const CostMatrix& c) {
  const int n = c.rows;
  const int m = c.cols;
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<int> solve_any(const CostMatrix& cost) {
  if (cost.rows == 0 || cost.cols == 0) return std::vector<int>(cost.rows, -1);
  if (cost.rows <= cost.cols) return hungarian_wide(cost);
  CostMatrix t(cost.cols, cost.rows);
  for (int r = 0; r < cost.rows; ++r)
    for (int c = 0; c < cost.cols; ++c) t.at(c, r) = cost.at(r, c);
  const std::vector<int> col_to_row = hungarian_wide(t);
  std::vector<int> row_to_col(cost.rows, -1);
  for (int c = 0; c < cost.cols; ++c)
    if (col_to_row[c] >= 0) row_to_col[col_to_row[c]] = c;
  return row_to_col;
}

double optimal_cost(const CostMatrix& cost) {
  const auto a = solve_any(cost);
  return assignment_cost(cost, a);
}

// Submatrix without the given rows/columns.
CostMatrix minor_matrix(const CostMatrix& cost, const std::vector<char>& row_gone,
                        const std::vector<char>& col_gone) {
  int nr = 0, nc = 0;
  for (char g : row_gone) nr += !g;
  for (char g : col_gone) nc += !g;
  CostMatrix out(nr, nc);
  int rr = 0;
  for (int r = 0; r < cost.rows; ++r) {
    if (row_gone[r]) continue;
    int cc = 0;
    for (int c = 0; c < cost.cols; ++c) {
      if (col_gone[c]) continue;
      out.at(rr, cc++) = cost.at(r, c);
    }
    ++rr;
  }
  return out;
}

std::vector<int> solve_lexicographic(const CostMatrix& cost) {
  const double best = optimal_cost(cost);
  const double tol = 1e-9 * std::max(1.0, std::fabs(best));
  std::vector<char> row_gone(cost.rows, 0), col_gone(cost.cols, 0);
  std::vector<int> result(cost.rows, -1);
  double fixed = 0.0;
  for (int r = 0; r < cost.rows; ++r) {
    row_gone[r] = 1;
    bool placed = false;
    for (int c = 0; c < cost.cols && !placed; ++c) {
      if (col_gone[c]) continue;
      col_gone[c] = 1;
      const double rest = optimal_cost(minor_matrix(cost, row_gone, col_gone));
      if (fixed + cost.at(r, c) + rest <= best + tol) {
        result[r] = c;
        fixed += cost.at(r, c);
        placed = true;
      } else {
        col_gone[c] = 0;
      }
    }
    // No column fits: every optimum leaves this row unmatched (rows > cols).
  }
  return result;
}

}  // namespace

std::vector<int> solve_assignment(const CostMatrix& cost, TieBreak tie) {
  if (tie == TieBreak::Lexicographic && cost.rows > 0 && cost.cols > 0) return solve_lexicographic(cost);
  return solve_any(cost);
}

double assignment_cost(const CostMatrix& cost, std::span<const int> row_to_col) {
  double total = 0.0;
  for (int r = 0; r < static_cast<int>(row_to_col.size()); ++r)
    if (row_to_col[r] >= 0) total += cost.at(r, row_to_col[r]);
  return total;
}

GatedMatches gated_assignment(const CostMatrix& cost, double max_cost, TieBreak tie) {
  CostMatrix priced = cost;
  for (double& x : priced.values)
    if (!(x <= max_cost)) x = max_cost + 1e-5;
  const std::vector<int> row_to_col = solve_assignment(priced, tie);

  GatedMatches out;
  std::vector<char> col_used(cost.cols, 0);
  for (int r = 0; r < cost.rows; ++r) {
    const int c = row_to_col[r];
    if (c >= 0 && cost.at(r, c) <= max_cost) {
      out.matches.emplace_back(r, c);
      col_used[c] = 1;
    } else {
      out.unmatched_rows.push_back(r);
    }
  }
  for (int c = 0; c < cost.cols; ++c)
    if (!col_used[c]) out.unmatched_cols.push_back(c);
  return out;
}

}  // namespace tsd
