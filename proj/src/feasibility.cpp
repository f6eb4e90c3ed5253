#include "blimp/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "blimp/lp.hpp"

namespace blimp {

Vec3 thrust_direction(const ThrusterSpec& thruster, double deflection) {
  const Vec3 k = thruster.axis();
  if (deflection == 0.0) return k;
  return Eigen::AngleAxisd(deflection, Vec3::UnitZ()) * k;
}

namespace {

void check_bounds(std::span<const ThrusterSpec> thrusters, std::span<const double> thrusts) {
  if (thrusts.size() != thrusters.size()) {
    std::ostringstream os;
    os << "expected " << thrusters.size() << " thrusts, got " << thrusts.size();
    throw std::invalid_argument(os.str());
  }
  for (std::size_t i = 0; i < thrusts.size(); ++i) {
    const auto& t = thrusters[i];
    const double slack = 1e-12 * std::max({1.0, std::abs(t.thrust_min), std::abs(t.thrust_max)});
    if (!(thrusts[i] >= t.thrust_min - slack && thrusts[i] <= t.thrust_max + slack)) {
      std::ostringstream os;
      os << "thrust " << thrusts[i] << " N on channel " << t.id << " outside [" << t.thrust_min << ", "
         << t.thrust_max << "]";
      throw std::out_of_range(os.str());
    }
  }
}

} // namespace

Wrench net_wrench(std::span<const ThrusterSpec> thrusters, std::span<const double> thrusts) {
  return net_wrench(thrusters, thrusts, {});
}

Wrench net_wrench(std::span<const ThrusterSpec> thrusters, std::span<const double> thrusts,
                  std::span<const double> deflections) {
  check_bounds(thrusters, thrusts);
  if (!deflections.empty() && deflections.size() != thrusters.size()) {
    throw std::invalid_argument("deflection count does not match thruster count");
  }
  Wrench w;
  for (std::size_t i = 0; i < thrusters.size(); ++i) {
    const double delta = deflections.empty() ? 0.0 : deflections[i];
    const Vec3 f = thrusts[i] * thrust_direction(thrusters[i], delta);
    w.force += f;
    w.moment += thrusters[i].position.cross(f);
  }
  return w;
}

const char* to_string(Primitive p) {
  switch (p) {
    case Primitive::forward: return "forward";
    case Primitive::altitude: return "altitude";
    case Primitive::yaw: return "yaw";
  }
  return "forward";
}

namespace {

// Rows of the wrench map used by the primitive LPs.
enum Row { kFx = 0, kFz = 1, kMz = 2 };

struct PrimitiveRows {
  Row target;
  Row coupling_a;
  Row coupling_b;
};

PrimitiveRows rows_for(Primitive p) {
  switch (p) {
    case Primitive::forward: return {kFx, kFz, kMz};
    case Primitive::altitude: return {kFz, kFx, kMz};
    case Primitive::yaw: return {kMz, kFx, kFz};
  }
  return {kFx, kFz, kMz};
}

std::vector<double> deflection_levels(const ThrusterSpec& t, int levels) {
  if (t.actuator != ActuatorKind::servo_vectored || levels < 2) return {0.0};
  std::vector<double> out;
  for (int k = 0; k < levels; ++k) {
    out.push_back(-t.max_deflection + 2.0 * t.max_deflection * k / (levels - 1));
  }
  // Undeflected first so plain configurations win ties.
  std::stable_sort(out.begin(), out.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (std::abs(out.front()) < 1e-15) out.front() = 0.0;
  return out;
}

struct DirectionResult {
  bool found = false;
  double value = -1.0;
  std::vector<double> thrusts;
  std::vector<double> deflections;
};

} // namespace

PrimitiveCertificate check_primitive(std::span<const ThrusterSpec> thrusters, Primitive primitive,
                                     const FeasibilityOptions& options) {
  const int n = static_cast<int>(thrusters.size());
  const PrimitiveRows rows = rows_for(primitive);
  const double eps = options.eps();

  std::vector<std::vector<double>> levels;
  for (const auto& t : thrusters) levels.push_back(deflection_levels(t, options.deflection_levels));

  Eigen::VectorXd lower(n), upper(n);
  for (int i = 0; i < n; ++i) {
    lower[i] = thrusters[i].thrust_min;
    upper[i] = thrusters[i].thrust_max;
  }

  // index 0: positive target direction, 1: negative
  std::array<DirectionResult, 2> best;
  const int directions = primitive == Primitive::forward ? 1 : 2;

  std::vector<std::size_t> choice(n, 0);
  while (true) {
    std::vector<double> deflections(n);
    Eigen::MatrixXd wrench_rows(3, n);
    for (int i = 0; i < n; ++i) {
      deflections[i] = levels[i][choice[i]];
      const Vec3 d = thrust_direction(thrusters[i], deflections[i]);
      const Vec3 m = thrusters[i].position.cross(d);
      wrench_rows(kFx, i) = d.x();
      wrench_rows(kFz, i) = d.z();
      wrench_rows(kMz, i) = m.z();
    }
    Eigen::MatrixXd A(2, n);
    A.row(0) = wrench_rows.row(rows.coupling_a);
    A.row(1) = wrench_rows.row(rows.coupling_b);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);

    for (int dir = 0; dir < directions; ++dir) {
      const double sign = dir == 0 ? 1.0 : -1.0;
      const Eigen::VectorXd c = sign * wrench_rows.row(rows.target).transpose();
      const lp::Result r = lp::maximize_box(c, A, zero, lower, upper);
      if (r.status != lp::Status::optimal) continue;
      auto& slot = best[dir];
      if (!slot.found || r.objective > slot.value + 1e-15) {
        slot.found = true;
        slot.value = r.objective;
        slot.thrusts.assign(r.x.data(), r.x.data() + n);
        slot.deflections = deflections;
      }
    }

    int k = 0;
    while (k < n && ++choice[k] == levels[k].size()) {
      choice[k] = 0;
      ++k;
    }
    if (k == n) break;
  }

  PrimitiveCertificate cert;
  cert.primitive = primitive;
  cert.positive_ok = best[0].found && best[0].value >= eps;
  cert.negative_ok = directions > 1 && best[1].found && best[1].value >= eps;
  cert.achievable = cert.positive_ok || cert.negative_ok;
  if (cert.achievable) {
    int pick;
    if (cert.positive_ok && cert.negative_ok) {
      // Larger magnitude wins; altitude ties go to ascending (negative F_pz).
      if (best[0].value > best[1].value) {
        pick = 0;
      } else if (best[1].value > best[0].value) {
        pick = 1;
      } else {
        pick = primitive == Primitive::altitude ? 1 : 0;
      }
    } else {
      pick = cert.positive_ok ? 0 : 1;
    }
    cert.target = (pick == 0 ? 1.0 : -1.0) * best[pick].value;
    cert.witness_thrusts = best[pick].thrusts;
    cert.witness_deflections = best[pick].deflections;
  }
  return cert;
}

NaiveCheck naive_motion_check(std::span<const ThrusterSpec> thrusters, double tol) {
  std::vector<double> f;
  for (const auto& t : thrusters) f.push_back(t.thrust_max);
  const Wrench w = net_wrench(thrusters, f);
  return {std::abs(w.force.x()) > tol, std::abs(w.force.z()) > tol, std::abs(w.moment.z()) > tol};
}

double ellipsoid_surface_area(double a, double b, double c) {
  const double p = kThomsenExponent;
  const double ap = std::pow(a, p), bp = std::pow(b, p), cp = std::pow(c, p);
  return 4.0 * kPi * std::pow((ap * bp + ap * cp + bp * cp) / 3.0, 1.0 / p);
}

double flat_envelope_area(double a, double b) { return 2.0 * kPi * a * b; }

double inflate_sphere_radius(double deflated_radius) {
  return std::sqrt(flat_envelope_area(deflated_radius, deflated_radius) / (4.0 * kPi));
}

double deflate_sphere_radius(double inflated_radius) {
  return std::sqrt(4.0 * kPi * inflated_radius * inflated_radius / (2.0 * kPi));
}

EnvelopeGeometry inflate_envelope(const BalloonSpec& b) {
  EnvelopeGeometry g;
  if (b.inflated_semi_axes) {
    const Vec3& s = *b.inflated_semi_axes;
    if (!(s.minCoeff() > 0.0)) throw EnvelopeError("inflated semi-axes must be positive");
    g.semi_axes = s;
    g.volume = 4.0 / 3.0 * kPi * s.x() * s.y() * s.z();
    return g;
  }
  if (!(b.deflated_a > 0.0 && b.deflated_b > 0.0)) throw EnvelopeError("envelope semi-axes must be positive");
  if (!(b.flatness_ratio > 0.0)) throw EnvelopeError("flatness ratio must be positive");
  g.flat_area = flat_envelope_area(b.deflated_a, b.deflated_b);

  if (b.shape == BalloonShape::sphere) {
    const double r = std::sqrt(g.flat_area / (4.0 * kPi));
    g.semi_axes = Vec3(r, r, r);
    g.volume = 4.0 / 3.0 * kPi * r * r * r;
    return g;
  }

  const double a2 = b.deflated_a, b2 = b.deflated_b;
  const double polar = b.flatness_ratio * std::min(a2, b2);
  auto area = [&](double k) { return ellipsoid_surface_area(k * a2, k * b2, k * polar); };

  double lo = 0.0, hi = 1.0;
  int expansions = 0;
  while (area(hi) < g.flat_area) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 200) throw EnvelopeError("bisection could not bracket the envelope scale");
  }
  const double length = std::max(a2, b2);
  while ((hi - lo) * length > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (area(mid) < g.flat_area) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double k = 0.5 * (lo + hi);
  g.semi_axes = Vec3(k * a2, k * b2, k * polar);
  g.volume = 4.0 / 3.0 * kPi * g.semi_axes.prod();
  return g;
}

double envelope_volume(const BalloonSpec& balloon) { return inflate_envelope(balloon).volume; }

double buoyancy(const EnvironmentConstants& env, double volume) {
  if (volume < 0.0) throw std::invalid_argument("volume must be non-negative");
  return env.air_density * volume * env.gravity;
}

double payload_mass(const EnvironmentConstants& env, double volume, const MassBudget& masses, double envelope_mass) {
  return volume * (env.air_density - env.helium_density) - (masses.electronics + envelope_mass + masses.support);
}

double volume_percent_error(double actual, double calculated) {
  if (calculated == 0.0) throw std::invalid_argument("calculated volume must be nonzero");
  return std::abs(calculated - actual) / std::abs(calculated) * 100.0;
}

MassProperties mass_properties(const DesignSpec& d) {
  MassProperties m;
  m.volume = envelope_volume(d.balloon);
  m.buoyancy = buoyancy(d.env, m.volume);
  m.payload_capacity = payload_mass(d.env, m.volume, d.masses, d.balloon.envelope_mass);
  const double lifted_air = d.env.air_density * m.volume;
  if (d.masses.payload) {
    m.carried_payload = *d.masses.payload;
    m.total_mass = d.env.helium_density * m.volume + d.masses.electronics + d.balloon.envelope_mass +
                   d.masses.support + m.carried_payload;
  } else if (m.payload_capacity >= 0.0) {
    // Trimmed: ballasted to exactly neutral buoyancy.
    m.carried_payload = m.payload_capacity;
    m.total_mass = lifted_air;
  } else {
    m.carried_payload = 0.0;
    m.total_mass =
        d.env.helium_density * m.volume + d.masses.electronics + d.balloon.envelope_mass + d.masses.support;
  }
  m.net_lift = d.env.gravity * (lifted_air - m.total_mass);
  return m;
}

bool FeasibilityReport::motion_ok() const {
  return std::all_of(primitives.begin(), primitives.end(), [](const auto& p) { return p.achievable; });
}

FeasibilityReport evaluate_feasibility(const DesignSpec& design, const FeasibilityOptions& options) {
  FeasibilityReport r;
  const std::span<const ThrusterSpec> th(design.thrusters);
  r.primitives[0] = check_primitive(th, Primitive::forward, options);
  r.primitives[1] = check_primitive(th, Primitive::altitude, options);
  r.primitives[2] = check_primitive(th, Primitive::yaw, options);
  r.naive = naive_motion_check(th, options.tol);
  r.envelope_volume = envelope_volume(design.balloon);
  r.buoyancy = buoyancy(design.env, r.envelope_volume);
  r.payload_mass = payload_mass(design.env, r.envelope_volume, design.masses, design.balloon.envelope_mass);
  r.payload_ok = r.payload_mass >= 0.0;
  return r;
}

} // namespace blimp
