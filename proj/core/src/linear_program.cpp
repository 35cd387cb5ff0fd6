#include "adfs/linear_program.hpp"

#include "adfs/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace adfs {

namespace {

constexpr double kPivotEps = 1e-11;

// Dense simplex tableau for  minimize d'x  s.t.  T x = rhs, x >= 0.
// Row m holds the reduced costs; column n holds the right-hand side.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  double& at(int r, int c) { return t_(r, c); }
  double value() const { return -t_(rows(), cols()); }
  const std::vector<int>& basis() const { return basis_; }

  void set_costs(const Eigen::VectorXd& cost) {
    const int m = rows();
    const int n = cols();
    t_.row(m).setZero();
    t_.row(m).head(n) = cost.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = cost[basis_[i]];
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  // Returns false if unbounded. Columns >= allowed never enter.
  bool optimize(int allowed) {
    const int m = rows();
    const int n = cols();
    for (long iter = 0; iter < 100000; ++iter) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (t_(m, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t_(i, enter) > kPivotEps) {
          const double ratio = t_(i, n) / t_(i, enter);
          if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw Error(ErrorCode::kInvalidArgument, "simplex iteration limit reached");
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_bounded_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = static_cast<int>(c.size());
  const int me = static_cast<int>(a_eq.rows());
  if (a_eq.cols() != n || b_eq.size() != me || lower.size() != n || upper.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "linear program dimensions are inconsistent");
  }
  if ((upper.array() < lower.array()).any()) {
    LpResult r;
    r.feasible = false;
    return r;
  }

  // Shift x = lower + y with 0 <= y <= u := upper - lower, and add slacks w
  // so that y + w = u. Columns: y (n), w (n), artificials (me).
  const Eigen::VectorXd u = upper - lower;
  const Eigen::VectorXd b = b_eq - a_eq * lower;
  const int m = me + n;
  const int cols = 2 * n + me;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols + 1);
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < me; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a_eq.row(i);
    t(i, 2 * n + i) = 1.0;
    t(i, cols) = sign * b[i];
    basis[static_cast<std::size_t>(i)] = 2 * n + i;
  }
  for (int j = 0; j < n; ++j) {
    t(me + j, j) = 1.0;
    t(me + j, n + j) = 1.0;
    t(me + j, cols) = u[j];
    basis[static_cast<std::size_t>(me + j)] = n + j;
  }
  Tableau tab(std::move(t), std::move(basis));

  LpResult result;
  if (me > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(me).setOnes();
    tab.set_costs(phase1);
    tab.optimize(cols);
    const double scale = 1.0 + b.cwiseAbs().sum();
    if (tab.value() > 1e-9 * scale) return result;
    // Drive zero-valued artificials out where a real column can replace them.
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < 2 * n) continue;
      for (int j = 0; j < 2 * n; ++j) {
        if (std::abs(tab.at(i, j)) > kPivotEps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }
  result.feasible = true;

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  phase2.head(n) = -c;
  tab.set_costs(phase2);
  if (!tab.optimize(2 * n)) {
    result.bounded = false;
    return result;
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis()[static_cast<std::size_t>(i)];
    if (bj < n) y[bj] = tab.at(i, cols);
  }
  result.x = lower + y;
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace adfs
