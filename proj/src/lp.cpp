#include "recede/lp.hpp"

#include <vector>

#include "recede/errors.hpp"

namespace recede {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

}  // namespace

std::optional<Eigen::VectorXd> lp_feasible(const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq,
                                           const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in) {
  const int n = static_cast<int>(a_eq.cols() > 0 ? a_eq.cols() : a_in.cols());
  const int me = static_cast<int>(a_eq.rows());
  const int mi = static_cast<int>(a_in.rows());
  const int m = me + mi;
  if (m == 0) return Eigen::VectorXd::Zero(n);

  // Columns: x+ (n), x- (n), slack (mi), artificial (m). Phase-1 objective
  // minimizes the artificial sum starting from the all-artificial basis.
  const int cols = 2 * n + mi + m;
  Eigen::MatrixXd t(m + 1, cols + 1);
  t.setZero();
  for (int i = 0; i < m; ++i) {
    Eigen::RowVectorXd row = i < me ? a_eq.row(i) : a_in.row(i - me);
    double rhs = i < me ? b_eq[i] : b_in[i - me];
    double sign = rhs < 0 ? -1.0 : 1.0;
    t.block(i, 0, 1, n) = sign * row;
    t.block(i, n, 1, n) = -sign * row;
    if (i >= me) t(i, 2 * n + (i - me)) = sign;
    t(i, 2 * n + mi + i) = 1.0;
    t(i, cols) = sign * rhs;
  }
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = 2 * n + mi + i;
  // Objective row: cost 1 on artificials, reduced through the start basis.
  for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
  t.block(m, 2 * n + mi, 1, m).setZero();

  const long max_pivots = 2000L + 50L * static_cast<long>(m) * cols;
  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) fail(ErrorCode::max_iterations, "lp_feasible: pivot limit hit");
    int enter = -1;
    for (int j = 0; j < cols; ++j)
      if (t(m, j) < -kPivotTol) {
        enter = j;
        break;  // Bland: lowest eligible index
      }
    if (enter < 0) break;
    int leave = -1;
    double best = 0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) <= kPivotTol) continue;
      double ratio = t(i, cols) / t(i, enter);
      if (leave < 0 || ratio < best - 1e-15 ||
          (ratio < best + 1e-15 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) fail(ErrorCode::validation_error, "lp_feasible: phase-1 unbounded");
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[leave] = enter;
  }

  double infeas = -t(m, cols);
  if (infeas > kFeasTol) return std::nullopt;

  Eigen::VectorXd xp = Eigen::VectorXd::Zero(n), xm = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n)
      xp[basis[i]] = t(i, cols);
    else if (basis[i] < 2 * n)
      xm[basis[i] - n] = t(i, cols);
  }
  return xp - xm;
}

}  // namespace recede
