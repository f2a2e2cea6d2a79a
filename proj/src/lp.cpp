#include "psafe/lp.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace psafe {

namespace {
constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;
}  // namespace

int SimplexSolver::pick_entering(int n_price,
                                 const std::vector<double>& cost_row) const {
  if (bland_) {
    for (int j = 0; j < n_price; ++j) {
      if (cost_row[j] < -kCostTol) return j;
    }
    return -1;
  }
  int best = -1;
  double best_cost = -kCostTol;
  for (int j = 0; j < n_price; ++j) {
    if (cost_row[j] < best_cost) {
      best_cost = cost_row[j];
      best = j;
    }
  }
  return best;
}

void SimplexSolver::pivot(int row, int col) {
  double* prow = body_.data() + static_cast<size_t>(row) * n_total_;
  double inv = 1.0 / prow[col];
  for (int j = 0; j < n_total_; ++j) prow[j] *= inv;
  prow[col] = 1.0;
  rhs_[row] *= inv;

  for (int r = 0; r < m_; ++r) {
    if (r == row) continue;
    double* q = body_.data() + static_cast<size_t>(r) * n_total_;
    double f = q[col];
    if (f == 0.0) continue;
    for (int j = 0; j < n_total_; ++j) q[j] -= f * prow[j];
    q[col] = 0.0;
    rhs_[r] -= f * rhs_[row];
    if (rhs_[r] < 0 && rhs_[r] > -1e-12) rhs_[r] = 0;
  }
  for (std::vector<double>* costs : {&phase1_, &phase2_}) {
    double f = (*costs)[col];
    if (f == 0.0) continue;
    for (int j = 0; j < n_total_; ++j) (*costs)[j] -= f * prow[j];
    (*costs)[col] = 0.0;
  }
  basis_[row] = col;
}

SimplexSolver::Status SimplexSolver::solve(int m, int n, const double* M,
                                           const double* b, const double* c,
                                           double* z) {
  m_ = m;
  n_total_ = n + m;  // artificials appended
  body_.assign(static_cast<size_t>(m) * n_total_, 0.0);
  rhs_.assign(m, 0.0);
  phase1_.assign(n_total_, 0.0);
  phase2_.assign(n_total_, 0.0);
  basis_.assign(m, 0);
  bland_ = false;

  for (int r = 0; r < m; ++r) {
    double sign = b[r] < 0 ? -1.0 : 1.0;
    const double* src = M + static_cast<size_t>(r) * n;
    double* dst = body_.data() + static_cast<size_t>(r) * n_total_;
    for (int j = 0; j < n; ++j) dst[j] = sign * src[j];
    dst[n + r] = 1.0;
    rhs_[r] = sign * b[r];
    basis_[r] = n + r;
  }
  // Phase-1 reduced costs: artificials cost 1, so subtract each row.
  double phase1_obj = 0;
  for (int r = 0; r < m; ++r) {
    const double* row = body_.data() + static_cast<size_t>(r) * n_total_;
    for (int j = 0; j < n; ++j) phase1_[j] -= row[j];
    phase1_obj += rhs_[r];
  }
  for (int j = 0; j < n; ++j) phase2_[j] = c[j];

  const long max_iter = 200L * (m + n) + 2000;
  long iter = 0;
  int degenerate_run = 0;

  auto run_phase = [&](const std::vector<double>& costs, int n_price,
                       bool phase_one) -> Status {
    while (true) {
      if (++iter > max_iter) return Status::IterationLimit;
      int col = pick_entering(n_price, costs);
      if (col < 0) return Status::Optimal;
      // Ratio test.
      int row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        double a = body_[static_cast<size_t>(r) * n_total_ + col];
        if (a > kPivotTol) {
          double ratio = rhs_[r] / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && row >= 0 &&
               basis_[r] < basis_[row])) {
            best_ratio = ratio;
            row = r;
          }
        }
      }
      if (row < 0) {
        return phase_one ? Status::Infeasible : Status::Unbounded;
      }
      if (best_ratio < 1e-12) {
        if (++degenerate_run > 4 * (m + n)) bland_ = true;
      } else {
        degenerate_run = 0;
        bland_ = false;
      }
      pivot(row, col);
    }
  };

  // Phase 1: price all columns (artificials have zero reduced cost and are
  // never attractive).
  Status s1 = run_phase(phase1_, n, true);
  if (s1 == Status::IterationLimit) return s1;
  double infeas = 0;
  for (int r = 0; r < m; ++r) {
    if (basis_[r] >= n) infeas += rhs_[r];
  }
  if (infeas > kFeasTol) return Status::Infeasible;

  // Drive leftover artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (basis_[r] < n) continue;
    const double* row = body_.data() + static_cast<size_t>(r) * n_total_;
    int col = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(row[j]) > 1e-8) {
        col = j;
        break;
      }
    }
    if (col >= 0) pivot(r, col);
    // Otherwise the row is redundant; the artificial stays basic at zero.
  }

  bland_ = false;
  Status s2 = run_phase(phase2_, n, false);
  if (s2 != Status::Optimal) return s2;

  std::memset(z, 0, sizeof(double) * n);
  for (int r = 0; r < m; ++r) {
    if (basis_[r] < n) z[basis_[r]] = rhs_[r];
  }
  objective_ = 0;
  for (int j = 0; j < n; ++j) objective_ += c[j] * z[j];
  return Status::Optimal;
}

}  // namespace psafe
