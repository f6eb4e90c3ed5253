#include "blimp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blimp::lp {

namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kCostEps = 1e-12;

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Eigen::MatrixXd::Zero(rows, cols + 1)), basis_(rows, -1), cols_(cols) {}

  double& at(int r, int c) { return t_(r, c); }
  double& rhs(int r) { return t_(r, cols_); }
  double rhs(int r) const { return t_(r, cols_); }
  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  /// Maximizes cost'z over columns where `allowed[j]` holds.
  void optimize(const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
    const int max_iter = 50 * (rows() + cols_) + 100;
    for (int iter = 0; iter < max_iter; ++iter) {
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (!allowed[j] || is_basic(j)) continue;
        double reduced = cost[j];
        for (int i = 0; i < rows(); ++i) reduced -= cost[basis_[i]] * t_(i, j);
        if (reduced > kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;

      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        if (t_(i, enter) <= kPivotEps) continue;
        const double ratio = rhs(i) / t_(i, enter);
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave >= 0 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) throw std::logic_error("simplex: unbounded direction in a box-bounded problem");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit reached");
  }

  double value(int col) const {
    for (int i = 0; i < static_cast<int>(basis_.size()); ++i) {
      if (basis_[i] == col) return rhs(i);
    }
    return 0.0;
  }

 private:
  bool is_basic(int col) const {
    for (int b : basis_) {
      if (b == col) return true;
    }
    return false;
  }

  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  int cols_;
};

} // namespace

Result maximize_box(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != m || lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("maximize_box: dimension mismatch");
  }
  Result result;
  for (int j = 0; j < n; ++j) {
    if (!(lower[j] <= upper[j])) return result;
  }

  // Columns: s (shifted x, n) | t (upper-bound slack, n) | artificials (m).
  const int cols = 2 * n + m;
  Tableau tab(m + n, cols);
  const Eigen::VectorXd shifted_b = b - A * lower;
  double scale = 1.0;
  for (int i = 0; i < m; ++i) {
    const double sign = shifted_b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.at(i, j) = sign * A(i, j);
    tab.at(i, 2 * n + i) = 1.0;
    tab.rhs(i) = sign * shifted_b[i];
    tab.basis()[i] = 2 * n + i;
    scale = std::max(scale, std::abs(shifted_b[i]));
  }
  for (int j = 0; j < n; ++j) {
    const int r = m + j;
    tab.at(r, j) = 1.0;
    tab.at(r, n + j) = 1.0;
    tab.rhs(r) = upper[j] - lower[j];
    tab.basis()[r] = n + j;
  }

  std::vector<bool> all(cols, true);
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < m; ++i) phase1[2 * n + i] = -1.0;
  tab.optimize(phase1, all);

  double infeasibility = 0.0;
  for (int i = 0; i < m; ++i) infeasibility += tab.value(2 * n + i);
  if (infeasibility > 1e-10 * scale) return result;

  // Drive zero-level artificials out of the basis where possible.
  for (int r = 0; r < tab.rows(); ++r) {
    if (tab.basis()[r] < 2 * n) continue;
    for (int j = 0; j < 2 * n; ++j) {
      if (std::abs(tab.at(r, j)) > 1e-9) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  std::vector<bool> structural(cols, false);
  for (int j = 0; j < 2 * n; ++j) structural[j] = true;
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  phase2.head(n) = c;
  tab.optimize(phase2, structural);

  result.status = Status::optimal;
  result.x.resize(n);
  for (int j = 0; j < n; ++j) {
    const double s = std::clamp(tab.value(j), 0.0, upper[j] - lower[j]);
    result.x[j] = lower[j] + s;
  }
  result.objective = c.dot(result.x);
  return result;
}

} // namespace blimp::lp
