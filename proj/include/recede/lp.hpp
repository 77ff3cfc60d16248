#pragma once

#include <Eigen/Core>
#include <optional>

namespace recede {

// Feasibility of { A_eq x = b_eq, A_in x <= b_in } over free x via phase-1
// simplex (Bland's rule, dense tableau). Returns a feasible point or nullopt.
// Sized for desk-scale instances (tens of rows); not a general LP solver.
std::optional<Eigen::VectorXd> lp_feasible(const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq,
                                           const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in);

inline std::optional<Eigen::VectorXd> lp_feasible_ineq(const Eigen::MatrixXd& a_in,
                                                       const Eigen::VectorXd& b_in) {
  return lp_feasible(Eigen::MatrixXd(0, a_in.cols()), Eigen::VectorXd(0), a_in, b_in);
}

}  // namespace recede
