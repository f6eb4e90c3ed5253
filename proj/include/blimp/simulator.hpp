#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "blimp/design.hpp"
#include "blimp/feasibility.hpp"
#include "blimp/performance.hpp"

namespace blimp {

enum class Integrator { semi_implicit_euler, rk4 };

struct SimConfig {
  double dt = 0.02;
  Integrator integrator = Integrator::rk4;
  double yaw_inertia = 0.01;     // kg m^2
  double yaw_drag_coeff = 0.005; // N m s^2 / rad^2
  double steady_state_window = 3.0;
  double steady_state_eps = 0.01;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// World frame is z-down; velocity is in the world frame.
struct SimState {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double roll = 0.0;
  double pitch = 0.0;

  double horizontal_speed() const { return std::hypot(velocity.x(), velocity.y()); }
};

/// Electrical commands, one entry per design thruster (design order):
/// motor duty in [-1, 1] and normalized servo command in [-1, 1]. An empty
/// deflection vector means no servo is driven.
struct Actuation {
  std::vector<double> duties;
  std::vector<double> deflections;

  static Actuation zero(const DesignSpec& design) { return {std::vector<double>(design.thrusters.size(), 0.0), {}}; }
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The simulated vehicle: a design plus its physical wiring.
class Plant {
 public:
  explicit Plant(DesignSpec design);

  const DesignSpec& design() const { return design_; }
  const MassProperties& mass() const { return mass_; }

  /// Thrust and servo angle each thruster produces for an actuation,
  /// including lead polarity and servo mounting sense.
  ThrustCommand resolve(const Actuation& actuation) const;

  /// Body-frame propulsion wrench for an actuation.
  Wrench wrench(const Actuation& actuation) const;

  /// Signed body-axis drag force (opposes body velocity).
  Vec3 drag(const Vec3& body_velocity) const;

  SimState step(const SimState& state, const Actuation& actuation, const SimConfig& config) const;

 private:
  struct Derivative {
    Vec3 velocity;
    Vec3 acceleration;
    double yaw_rate;
    double yaw_accel;
  };
  Derivative derivative(const SimState& s, const Wrench& w, const SimConfig& config) const;

  DesignSpec design_;
  MassProperties mass_;
  std::array<double, 3> drag_k_{};
};

SimState step(const SimState& state, const DesignSpec& design, const Actuation& actuation, const SimConfig& config);

/// Sliding-window steady-state test on speed: steady once a full window has
/// been observed with max - min below eps.
class SteadyStateDetector {
 public:
  SteadyStateDetector(double window, double eps) : window_(window), eps_(eps) {}
  void push(double time, double speed);
  bool steady() const { return steady_; }
  void reset() {
    samples_.clear();
    steady_ = false;
  }

 private:
  double window_;
  double eps_;
  std::deque<std::pair<double, double>> samples_;
  bool steady_ = false;
};

struct Trajectory {
  std::vector<SimState> samples;
  bool steady = false;
  double steady_since = -1.0; // first time the steady flag was raised
};

using DutySchedule = std::function<Actuation(double time)>;

Trajectory run(const DesignSpec& design, const DutySchedule& schedule, double duration, const SimConfig& config,
               const SimState& initial = {});

/// CSV with header `t,vx,vy,vz,speed_h,psi,psidot`, 6 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

} // namespace blimp
