#include "blimp/performance.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace blimp {

Eigen::Matrix3d rotation_wb(const Attitude& att) {
  return (Eigen::AngleAxisd(att.yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(att.pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(att.roll, Vec3::UnitX()))
      .toRotationMatrix();
}

double drag_force(double cd, double csa, double air_density, double speed) {
  return 0.5 * air_density * speed * speed * cd * csa;
}

std::pair<double, double> axis_drag(const DragConfig& drag, int axis) {
  switch (axis) {
    case 0: return {drag.cd_x, drag.csa_yz};
    case 1: return {drag.cd_y, drag.csa_xz};
    default: return {drag.cd_z, drag.csa_xy};
  }
}

namespace {

Vec3 propulsion(const DesignSpec& design, const ThrustCommand& command) {
  return net_wrench(design.thrusters, command.thrusts, command.deflections).force;
}

// Net non-drag body force at steady state; drag must cancel it.
Vec3 steady_drive(const DesignSpec& design, const Vec3& force, const Attitude& attitude) {
  const MassProperties mp = mass_properties(design);
  const Eigen::Matrix3d r_bw = rotation_wb(attitude).transpose();
  return force - r_bw * Vec3(0.0, 0.0, mp.net_lift);
}

} // namespace

Vec3 terminal_drag(const DesignSpec& design, const ThrustCommand& command, const Attitude& attitude) {
  const Vec3 drive = steady_drive(design, propulsion(design, command), attitude);
  return {drive.x(), drive.y(), -drive.z()};
}

Vec3 terminal_drag(const DesignSpec& design, std::span<const double> thrusts, const Attitude& attitude) {
  return terminal_drag(design, ThrustCommand{{thrusts.begin(), thrusts.end()}, {}}, attitude);
}

PerformanceReport terminal_velocity(const DesignSpec& design, const ThrustCommand& command,
                                    const Attitude& attitude) {
  PerformanceReport r;
  r.attitude_used = attitude;
  r.net_propulsion = propulsion(design, command);
  const Vec3 drive = steady_drive(design, r.net_propulsion, attitude);
  r.terminal_drag = Vec3(drive.x(), drive.y(), -drive.z());

  const double thrust_floor = 1e-12;
  for (int axis = 0; axis < 3; ++axis) {
    const double n = drive[axis];
    const double thrust = r.net_propulsion[axis];
    if (std::abs(thrust) > thrust_floor && n * thrust <= 0.0) {
      r.opposed[axis] = true;
      continue;
    }
    const auto [cd, area] = axis_drag(design.drag, axis);
    const double v = std::sqrt(2.0 * std::abs(n) / (design.env.air_density * cd * area));
    r.v_max_body[axis] = v;
    r.v_terminal_body[axis] = n < 0.0 ? -v : v;
  }
  return r;
}

PerformanceReport terminal_velocity(const DesignSpec& design, std::span<const double> thrusts,
                                    const Attitude& attitude) {
  return terminal_velocity(design, ThrustCommand{{thrusts.begin(), thrusts.end()}, {}}, attitude);
}

MaxPerformance max_performance(const DesignSpec& design, const FeasibilityOptions& options) {
  const FeasibilityReport feas = evaluate_feasibility(design, options);
  for (const auto& p : feas.primitives) {
    if (!p.achievable) {
      throw InfeasibleDesign(std::string("design fails the ") + to_string(p.primitive) + " motion primitive");
    }
  }
  const auto& fwd = feas.primitive(Primitive::forward);
  const auto& alt = feas.primitive(Primitive::altitude);

  MaxPerformance out;
  out.horizontal = terminal_velocity(design, ThrustCommand{*fwd.witness_thrusts, fwd.witness_deflections});
  out.vertical = terminal_velocity(design, ThrustCommand{*alt.witness_thrusts, alt.witness_deflections});
  out.v_max_horizontal = out.horizontal.v_max_body.x();
  out.v_max_vertical = out.vertical.v_max_body.z();
  return out;
}

} // namespace blimp
