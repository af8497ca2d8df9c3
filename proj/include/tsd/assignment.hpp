#pragma once

// Minimum-cost bipartite assignment (Kuhn-Munkres with row/column potentials).

#include <span>
#include <utility>
#include <vector>

namespace tsd {

/// Row-major dense cost matrix.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

enum class TieBreak {
  /// Whatever optimum the solver reaches first (deterministic, not ordered).
  Any,
  /// Among optimal assignments, the lexicographically smallest row->column map
  /// (lower row first, then lower column). Costs O(rows * cols) extra solves.
  Lexicographic,
};

/// Matches min(rows, cols) pairs minimizing total cost. Returns row -> column
/// (-1 for rows left unmatched when rows > cols).
std::vector<int> solve_assignment(const CostMatrix& cost, TieBreak tie = TieBreak::Any);

/// Sum of cost over the matched pairs, accumulated in row order.
double assignment_cost(const CostMatrix& cost, std::span<const int> row_to_col);

struct GatedMatches {
  std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Entries above `max_cost` are non-edges. Follows the usual tracking
/// convention: non-edges are priced at max_cost + 1e-5 so that leaving a row
/// unmatched competes fairly with a poor match, then dropped from the result.
GatedMatches gated_assignment(const CostMatrix& cost, double max_cost,
                              TieBreak tie = TieBreak::Any);

}  // namespace tsd
