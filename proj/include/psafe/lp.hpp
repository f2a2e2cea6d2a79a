#pragma once

#include <vector>

namespace psafe {

/// Dense two-phase primal simplex for
///     min c.z   subject to   M z = b,  z >= 0.
/// Sized for the sequence-form programs of this project (tens of rows);
/// workspace is reused across solves. Dantzig pricing with a Bland fallback
/// after long degenerate runs.
class SimplexSolver {
 public:
  enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

  /// M is row-major m x n. On Optimal, z (size n) holds a basic optimal
  /// solution and objective() its cost.
  Status solve(int m, int n, const double* M, const double* b,
               const double* c, double* z);

  double objective() const { return objective_; }

 private:
  int pick_entering(int n_price, const std::vector<double>& cost_row) const;
  void pivot(int row, int col);

  int m_ = 0, n_total_ = 0;
  std::vector<double> body_;   // m x n_total tableau
  std::vector<double> rhs_;    // m
  std::vector<double> phase1_; // reduced costs, phase 1
  std::vector<double> phase2_; // reduced costs, phase 2
  std::vector<int> basis_;
  bool bland_ = false;
  double objective_ = 0;
};

}  // namespace psafe
