#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace blimp {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Grams-force to newtons under the given gravitational acceleration.
inline double grams_force_to_newtons(double grams, double gravity) { return grams * gravity / 1000.0; }
inline double newtons_to_grams_force(double newtons, double gravity) { return newtons * 1000.0 / gravity; }

struct EnvironmentConstants {
  double air_density = 1.225;     // kg/m^3
  double helium_density = 0.1786; // kg/m^3
  double gravity = 9.81;          // m/s^2
};

enum class ActuatorKind { dc_motor, servo_vectored };

/// One thrust component of the vehicle.
///
/// `id` is the motor-driver channel the thruster is wired to. The wiring
/// fields describe the physical build (lead polarity, which servo port tilts
/// the thruster); they are the ground truth the simulated plant uses and are
/// never read by the feasibility or performance evaluators.
struct ThrusterSpec {
  int id = 0;
  Vec3 position = Vec3::Zero();
  std::array<int, 3> orientation{1, 0, 0};
  double thrust_min = 0.0; // N
  double thrust_max = 0.0; // N
  ActuatorKind actuator = ActuatorKind::dc_motor;

  int wiring_polarity = 1;
  int servo_port = 0; // 0: no servo attached
  int servo_polarity = 1;
  double max_deflection = kPi / 3.0; // rad, servo_vectored only

  /// Unit thrust direction K_i in the body frame.
  Vec3 axis() const { return Vec3(orientation[0], orientation[1], orientation[2]); }
};

enum class BalloonShape { sphere, saucer, oval, irregular_oval };

double default_flatness_ratio(BalloonShape shape);

struct BalloonSpec {
  BalloonShape shape = BalloonShape::sphere;
  double deflated_a = 0.0; // m, 2D envelope semi-axes
  double deflated_b = 0.0;
  std::optional<Vec3> inflated_semi_axes;
  double envelope_mass = 0.0; // kg
  double flatness_ratio = 1.0;
};

struct MassBudget {
  double electronics = 0.0; // kg
  double support = 0.0;     // kg
  /// Carried payload. When absent the vehicle is trimmed to neutral buoyancy
  /// by carrying exactly its payload capacity (or nothing if that is negative).
  std::optional<double> payload;
};

struct DragConfig {
  double cd_x = 0.0, cd_y = 0.0, cd_z = 0.0;
  double csa_yz = 0.0; // faces x-motion
  double csa_xz = 0.0; // faces y-motion
  double csa_xy = 0.0; // faces z-motion
};

struct HardwareDims {
  double propeller_diameter = 0.0;
  double motor_length = 0.0;
  double motor_diameter = 0.0;
  Vec3 board_dims = Vec3::Zero();
};

struct DesignSpec {
  std::string name;
  std::vector<ThrusterSpec> thrusters;
  BalloonSpec balloon;
  MassBudget masses;
  DragConfig drag;
  EnvironmentConstants env;
  std::optional<HardwareDims> hardware;

  const ThrusterSpec* find_channel(int id) const;
};

/// Piecewise-linear duty-to-thrust map: positive duty scales thrust_max,
/// negative duty scales |thrust_min|, and zero duty gives zero thrust.
/// Bounds that exclude zero (a thruster that can only push one way at a
/// non-zero floor) interpolate linearly from thrust_min at -1 to thrust_max
/// at +1 instead.
class ThrusterModel {
 public:
  ThrusterModel(double thrust_min, double thrust_max);
  explicit ThrusterModel(const ThrusterSpec& spec) : ThrusterModel(spec.thrust_min, spec.thrust_max) {}

  double thrust_min() const { return min_; }
  double thrust_max() const { return max_; }

  /// Throws std::out_of_range when duty is outside [-1, 1].
  double thrust(double duty) const;

  /// Duty producing the given thrust; thrust must lie in
  /// [thrust_min, thrust_max].
  double duty_for(double thrust) const;

 private:
  double min_;
  double max_;
};

double duty_to_thrust(const ThrusterModel& model, double duty);

struct FieldError {
  std::string path;
  std::string message;
};

/// Raised for malformed or invalid design documents.
class DesignError : public std::runtime_error {
 public:
  enum class Kind { syntax, schema, invariant };

  DesignError(Kind kind, std::vector<FieldError> errors, int line = 0, int column = 0);

  Kind kind() const { return kind_; }
  const std::vector<FieldError>& errors() const { return errors_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  std::vector<FieldError> errors_;
  int line_;
  int column_;
};

std::vector<FieldError> validate(const DesignSpec& design);
void validate_or_throw(const DesignSpec& design);

/// Field-wise comparison with a relative tolerance on floating values.
bool approx_equal(const DesignSpec& a, const DesignSpec& b, double rel_tol = 1e-12);

const char* to_string(ActuatorKind kind);
const char* to_string(BalloonShape shape);
std::optional<ActuatorKind> actuator_from_string(std::string_view s);
std::optional<BalloonShape> shape_from_string(std::string_view s);

} // namespace blimp
