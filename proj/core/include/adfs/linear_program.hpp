#pragma once

#include <Eigen/Dense>

namespace adfs {

struct LpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  bool feasible = false;
  bool bounded = true;
};

/// maximize c'x  subject to  A_eq x = b_eq,  lower <= x <= upper.
/// Dense two-phase simplex with Bland's rule; intended for the small
/// problems of probe design (N up to a few hundred).
LpResult solve_bounded_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

}  // namespace adfs
