#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blimp/design.hpp"

namespace blimp {

struct Wrench {
  Vec3 force = Vec3::Zero();  // F_p, N
  Vec3 moment = Vec3::Zero(); // M_p, N*m about the body origin
};

/// K_i rotated about body z by a servo deflection (radians).
Vec3 thrust_direction(const ThrusterSpec& thruster, double deflection = 0.0);

/// F_p = sum f_i K_i and M_p = sum p_i x (f_i K_i). The moment arm of each
/// thruster is its body-frame position.
///
/// Throws std::invalid_argument on a length mismatch and std::out_of_range
/// when a thrust lies outside its thruster's bounds.
Wrench net_wrench(std::span<const ThrusterSpec> thrusters, std::span<const double> thrusts);
Wrench net_wrench(std::span<const ThrusterSpec> thrusters, std::span<const double> thrusts,
                  std::span<const double> deflections);

enum class Primitive { forward, altitude, yaw };
const char* to_string(Primitive p);

struct FeasibilityOptions {
  double tol = 1e-6; // N for forces, N*m for moments
  std::optional<double> epsilon; // minimum target magnitude; defaults to tol
  int deflection_levels = 5;     // servo angles tried per vectored thruster

  double eps() const { return epsilon.value_or(tol); }
};

/// Existence proof (or refutation) for one motion primitive.
///
/// The target component is F_px (forward), F_pz (altitude) or M_pz (yaw).
/// `positive_ok` / `negative_ok` say in which signed directions the target is
/// reachable while the coupling components are held at zero; forward only
/// counts the positive direction. Altitude "ascend" is negative F_pz since
/// the body z axis points down.
struct PrimitiveCertificate {
  Primitive primitive = Primitive::forward;
  bool achievable = false;
  bool positive_ok = false;
  bool negative_ok = false;
  double target = 0.0; // value of the target component at the witness
  std::optional<std::vector<double>> witness_thrusts;
  std::vector<double> witness_deflections;
};

PrimitiveCertificate check_primitive(std::span<const ThrusterSpec> thrusters, Primitive primitive,
                                     const FeasibilityOptions& options = {});

/// Componentwise nonzero test of F_px, F_pz, M_pz with every thruster at its
/// maximum thrust and no servo deflection.
struct NaiveCheck {
  bool fx_nonzero = false;
  bool fz_nonzero = false;
  bool mz_nonzero = false;
};

NaiveCheck naive_motion_check(std::span<const ThrusterSpec> thrusters, double tol = 1e-6);

// --- Envelope and payload -------------------------------------------------

class EnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kThomsenExponent = 1.6075;

/// Knud Thomsen's approximation of an ellipsoid's surface area.
double ellipsoid_surface_area(double a, double b, double c);

/// Flat envelope area of two elliptical sheets with the given semi-axes.
double flat_envelope_area(double a, double b);

/// Radius of the inflated sphere whose surface equals the two-disc envelope.
double inflate_sphere_radius(double deflated_radius);
/// Inverse of inflate_sphere_radius.
double deflate_sphere_radius(double inflated_radius);

struct EnvelopeGeometry {
  Vec3 semi_axes = Vec3::Zero(); // inflated, m
  double volume = 0.0;           // m^3
  double flat_area = 0.0;        // m^2, zero when semi-axes were given
};

/// Inflated shape of a balloon. Given inflated semi-axes are used as-is;
/// otherwise spheres invert the disc area exactly and other shapes use an
/// oblate ellipsoid (equatorial axes scaled from the flat envelope, polar
/// axis set by the flatness ratio) sized by bisection so its surface matches
/// the flat envelope area.
EnvelopeGeometry inflate_envelope(const BalloonSpec& balloon);
double envelope_volume(const BalloonSpec& balloon);

/// Archimedes lift rho_air * V * g.
double buoyancy(const EnvironmentConstants& env, double volume);

/// m_payload = V (rho_air - rho_helium) - (m_elec + m_envelope + m_sup).
double payload_mass(const EnvironmentConstants& env, double volume, const MassBudget& masses, double envelope_mass);

/// |calculated - actual| / calculated * 100.
double volume_percent_error(double actual, double calculated);

/// Mass figures used by the dynamics.
struct MassProperties {
  double volume = 0.0;
  double buoyancy = 0.0;          // N
  double payload_capacity = 0.0;  // kg
  double carried_payload = 0.0;   // kg
  double total_mass = 0.0;        // kg, including the lifting gas
  double net_lift = 0.0;          // F_B - m g, N
};

MassProperties mass_properties(const DesignSpec& design);

struct FeasibilityReport {
  std::array<PrimitiveCertificate, 3> primitives;
  NaiveCheck naive;
  double envelope_volume = 0.0;
  double buoyancy = 0.0;
  double payload_mass = 0.0;
  bool payload_ok = false;

  const PrimitiveCertificate& primitive(Primitive p) const { return primitives[static_cast<int>(p)]; }
  bool motion_ok() const;
  bool all_ok() const { return motion_ok() && payload_ok; }
};

FeasibilityReport evaluate_feasibility(const DesignSpec& design, const FeasibilityOptions& options = {});

} // namespace blimp
