#include "blimp/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace blimp {

void SimConfig::validate() const {
  if (!(dt > 0.0 && dt <= 0.1)) throw std::invalid_argument("dt must be in (0, 0.1]");
  if (!(yaw_inertia > 0.0)) throw std::invalid_argument("yaw_inertia must be positive");
  if (!(yaw_drag_coeff > 0.0)) throw std::invalid_argument("yaw_drag_coeff must be positive");
  if (!(steady_state_window > 0.0)) throw std::invalid_argument("steady_state_window must be positive");
  if (!(steady_state_eps > 0.0)) throw std::invalid_argument("steady_state_eps must be positive");
}

Plant::Plant(DesignSpec design) : design_(std::move(design)), mass_(mass_properties(design_)) {
  for (int axis = 0; axis < 3; ++axis) {
    const auto [cd, area] = axis_drag(design_.drag, axis);
    drag_k_[axis] = 0.5 * design_.env.air_density * cd * area;
  }
}

ThrustCommand Plant::resolve(const Actuation& a) const {
  const auto& th = design_.thrusters;
  if (a.duties.size() != th.size()) {
    std::ostringstream os;
    os << "expected " << th.size() << " duties, got " << a.duties.size();
    throw std::invalid_argument(os.str());
  }
  if (!a.deflections.empty() && a.deflections.size() != th.size()) {
    throw std::invalid_argument("deflection count does not match thruster count");
  }
  ThrustCommand cmd;
  cmd.thrusts.resize(th.size());
  cmd.deflections.assign(th.size(), 0.0);
  for (std::size_t i = 0; i < th.size(); ++i) {
    const ThrusterModel model(th[i]);
    cmd.thrusts[i] = model.thrust(th[i].wiring_polarity * a.duties[i]);
    if (!a.deflections.empty() && th[i].actuator == ActuatorKind::servo_vectored) {
      const double u = a.deflections[i];
      if (!(u >= -1.0 && u <= 1.0)) throw std::out_of_range("servo command outside [-1, 1]");
      cmd.deflections[i] = th[i].servo_polarity * u * th[i].max_deflection;
    }
  }
  return cmd;
}

Wrench Plant::wrench(const Actuation& a) const {
  const ThrustCommand cmd = resolve(a);
  return net_wrench(design_.thrusters, cmd.thrusts, cmd.deflections);
}

Vec3 Plant::drag(const Vec3& v) const {
  Vec3 d;
  for (int axis = 0; axis < 3; ++axis) d[axis] = -drag_k_[axis] * v[axis] * std::abs(v[axis]);
  return d;
}

Plant::Derivative Plant::derivative(const SimState& s, const Wrench& w, const SimConfig& config) const {
  const Eigen::Matrix3d r_wb = rotation_wb({s.roll, s.pitch, s.yaw});
  const Vec3 v_body = r_wb.transpose() * s.velocity;
  const Vec3 body_force = w.force + drag(v_body);
  // z-down: the weight/buoyancy row is m g - F_B = -net_lift.
  const Vec3 accel = (Vec3(0.0, 0.0, -mass_.net_lift) + r_wb * body_force) / mass_.total_mass;
  const double yaw_drag = (s.yaw_rate > 0.0 ? 1.0 : s.yaw_rate < 0.0 ? -1.0 : 0.0) * config.yaw_drag_coeff *
                          s.yaw_rate * s.yaw_rate;
  const double yaw_accel = (w.moment.z() - yaw_drag) / config.yaw_inertia;
  return {s.velocity, accel, s.yaw_rate, yaw_accel};
}

namespace {

SimState advance(const SimState& s, const Vec3& dpos, const Vec3& dvel, double dyaw, double drate, double dt) {
  SimState out = s;
  out.position += dpos * dt;
  out.velocity += dvel * dt;
  out.yaw += dyaw * dt;
  out.yaw_rate += drate * dt;
  out.time += dt;
  return out;
}

void check_finite(const SimState& s) {
  const char* axis[] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(s.velocity[k])) throw SimulationError(std::string("velocity.") + axis[k] + " diverged");
  }
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(s.position[k])) throw SimulationError(std::string("position.") + axis[k] + " diverged");
  }
  if (!std::isfinite(s.yaw_rate)) throw SimulationError("yaw_rate diverged");
  if (!std::isfinite(s.yaw)) throw SimulationError("yaw diverged");
}

} // namespace

SimState Plant::step(const SimState& s, const Actuation& a, const SimConfig& config) const {
  const Wrench w = wrench(a);
  const double dt = config.dt;
  SimState next;
  if (config.integrator == Integrator::semi_implicit_euler) {
    const Derivative d = derivative(s, w, config);
    next = s;
    next.velocity += d.acceleration * dt;
    next.yaw_rate += d.yaw_accel * dt;
    next.position += next.velocity * dt;
    next.yaw += next.yaw_rate * dt;
    next.time += dt;
  } else {
    const Derivative k1 = derivative(s, w, config);
    const Derivative k2 =
        derivative(advance(s, k1.velocity, k1.acceleration, k1.yaw_rate, k1.yaw_accel, dt / 2), w, config);
    const Derivative k3 =
        derivative(advance(s, k2.velocity, k2.acceleration, k2.yaw_rate, k2.yaw_accel, dt / 2), w, config);
    const Derivative k4 = derivative(advance(s, k3.velocity, k3.acceleration, k3.yaw_rate, k3.yaw_accel, dt), w, config);
    next = advance(s, (k1.velocity + 2 * k2.velocity + 2 * k3.velocity + k4.velocity) / 6.0,
                   (k1.acceleration + 2 * k2.acceleration + 2 * k3.acceleration + k4.acceleration) / 6.0,
                   (k1.yaw_rate + 2 * k2.yaw_rate + 2 * k3.yaw_rate + k4.yaw_rate) / 6.0,
                   (k1.yaw_accel + 2 * k2.yaw_accel + 2 * k3.yaw_accel + k4.yaw_accel) / 6.0, dt);
  }
  check_finite(next);
  return next;
}

SimState step(const SimState& state, const DesignSpec& design, const Actuation& actuation, const SimConfig& config) {
  config.validate();
  return Plant(design).step(state, actuation, config);
}

void SteadyStateDetector::push(double time, double speed) {
  samples_.emplace_back(time, speed);
  while (samples_.size() > 1 && samples_.back().first - samples_[1].first >= window_) samples_.pop_front();
  if (samples_.back().first - samples_.front().first < window_ - 1e-9) {
    steady_ = false;
    return;
  }
  const auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  steady_ = hi->second - lo->second < eps_;
}

Trajectory run(const DesignSpec& design, const DutySchedule& schedule, double duration, const SimConfig& config,
               const SimState& initial) {
  config.validate();
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  const Plant plant(design);
  Trajectory traj;
  SteadyStateDetector detector(config.steady_state_window, config.steady_state_eps);
  SimState s = initial;
  traj.samples.push_back(s);
  detector.push(s.time, s.velocity.norm());
  const auto steps = static_cast<long>(std::ceil(duration / config.dt - 1e-9));
  for (long i = 0; i < steps; ++i) {
    s = plant.step(s, schedule(s.time), config);
    traj.samples.push_back(s);
    detector.push(s.time, s.velocity.norm());
    if (detector.steady() && traj.steady_since < 0.0) traj.steady_since = s.time;
  }
  traj.steady = detector.steady();
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,vx,vy,vz,speed_h,psi,psidot\n";
  char buf[256];
  for (const auto& s : trajectory.samples) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", s.time, s.velocity.x(), s.velocity.y(),
                  s.velocity.z(), s.horizontal_speed(), s.yaw, s.yaw_rate);
    out << buf;
  }
}

} // namespace blimp
