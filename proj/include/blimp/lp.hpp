#pragma once

#include <vector>

#include <Eigen/Core>

namespace blimp::lp {

enum class Status { optimal, infeasible };

struct Result {
  Status status = Status::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// maximize c'x  subject to  A x = b,  lower <= x <= upper.
///
/// Dense two-phase simplex with Bland's rule, so ties resolve towards the
/// lowest variable index and results are deterministic. The box makes the
/// problem bounded; the only failure mode is infeasibility.
Result maximize_box(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

} // namespace blimp::lp
