#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "blimp/design.hpp"
#include "blimp/feasibility.hpp"

namespace blimp {

struct Attitude {
  double roll = 0.0;  // phi
  double pitch = 0.0; // theta
  double yaw = 0.0;   // psi
};

/// Body-to-world rotation R_wb = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d rotation_wb(const Attitude& att);

/// Quadratic drag magnitude 0.5 rho v^2 C_D A.
double drag_force(double cd, double csa, double air_density, double speed);

/// (C_D, A) facing motion along body axis 0, 1 or 2.
std::pair<double, double> axis_drag(const DragConfig& drag, int axis);

/// Per-thruster thrust (N) and servo deflection (rad, may be empty).
struct ThrustCommand {
  std::vector<double> thrusts;
  std::vector<double> deflections;
};

/// Terminal drag with all accelerations set to zero:
///   [f_x, f_y, -f_z] = [F_X, F_Y, F_Z] - R_bw [0, 0, F_B - m g].
/// Returns (f_x, f_y, f_z) in that sign convention, i.e. f_x, f_y are drag
/// magnitudes along +x/+y motion and f_z is the signed term added to F_Z in
/// the body-frame force balance (body z points down).
Vec3 terminal_drag(const DesignSpec& design, const ThrustCommand& command, const Attitude& attitude = {});
Vec3 terminal_drag(const DesignSpec& design, std::span<const double> thrusts, const Attitude& attitude = {});

struct PerformanceReport {
  Vec3 terminal_drag = Vec3::Zero();
  /// Steady body-frame speed magnitude per axis; zero where the net force
  /// opposes the commanded thrust on that axis (see `opposed`).
  Vec3 v_max_body = Vec3::Zero();
  /// Signed steady body velocity (same magnitudes as v_max_body).
  Vec3 v_terminal_body = Vec3::Zero();
  std::array<bool, 3> opposed{false, false, false};
  Attitude attitude_used;
  Vec3 net_propulsion = Vec3::Zero();
};

PerformanceReport terminal_velocity(const DesignSpec& design, const ThrustCommand& command,
                                    const Attitude& attitude = {});
PerformanceReport terminal_velocity(const DesignSpec& design, std::span<const double> thrusts,
                                    const Attitude& attitude = {});

class InfeasibleDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MaxPerformance {
  PerformanceReport horizontal; // at the forward-primitive witness
  PerformanceReport vertical;   // at the altitude-primitive witness
  double v_max_horizontal = 0.0;
  double v_max_vertical = 0.0;
};

/// Steady speeds at the thrust assignments that maximize forward force and
/// vertical force magnitude while keeping the motion decoupled. Throws
/// InfeasibleDesign if any motion primitive is unachievable.
MaxPerformance max_performance(const DesignSpec& design, const FeasibilityOptions& options = {});

} // namespace blimp
