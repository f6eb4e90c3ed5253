#include "blimp/design.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace blimp {

double default_flatness_ratio(BalloonShape shape) {
  switch (shape) {
    case BalloonShape::sphere: return 1.0;
    case BalloonShape::saucer: return 0.6;
    case BalloonShape::oval: return 0.75;
    case BalloonShape::irregular_oval: return 0.75;
  }
  return 1.0;
}

const ThrusterSpec* DesignSpec::find_channel(int id) const {
  for (const auto& t : thrusters) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

ThrusterModel::ThrusterModel(double thrust_min, double thrust_max) : min_(thrust_min), max_(thrust_max) {
  if (!(thrust_min <= thrust_max)) throw std::invalid_argument("thrust_min must not exceed thrust_max");
}

double ThrusterModel::thrust(double duty) const {
  if (!(duty >= -1.0 && duty <= 1.0)) {
    std::ostringstream os;
    os << "duty " << duty << " outside [-1, 1]";
    throw std::out_of_range(os.str());
  }
  if (min_ > 0.0 || max_ < 0.0) {
    // Bounds exclude zero: plain interpolation between the endpoints.
    if (duty == 1.0) return max_;
    return min_ + 0.5 * (duty + 1.0) * (max_ - min_);
  }
  if (duty >= 0.0) return duty * max_;
  return -duty * min_;
}

double ThrusterModel::duty_for(double thrust) const {
  if (thrust < min_ || thrust > max_) throw std::out_of_range("thrust outside thruster bounds");
  if (min_ > 0.0 || max_ < 0.0) return max_ == min_ ? 1.0 : 2.0 * (thrust - min_) / (max_ - min_) - 1.0;
  if (thrust == 0.0) return 0.0;
  if (thrust > 0.0) return thrust / max_;
  return -thrust / min_;
}

double duty_to_thrust(const ThrusterModel& model, double duty) { return model.thrust(duty); }

DesignError::DesignError(Kind kind, std::vector<FieldError> errors, int line, int column)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << (kind == Kind::syntax ? "syntax error" : kind == Kind::schema ? "schema error" : "invalid design");
        if (line > 0) os << " at line " << line << ", column " << column;
        for (const auto& e : errors) os << "; " << (e.path.empty() ? "" : e.path + ": ") << e.message;
        return os.str();
      }()),
      kind_(kind),
      errors_(std::move(errors)),
      line_(line),
      column_(column) {}

namespace {

bool finite3(const Vec3& v) { return v.allFinite(); }

void require_positive(std::vector<FieldError>& out, const std::string& path, double v) {
  if (!(std::isfinite(v) && v > 0.0)) out.push_back({path, "must be strictly positive"});
}

void require_nonnegative(std::vector<FieldError>& out, const std::string& path, double v) {
  if (!(std::isfinite(v) && v >= 0.0)) out.push_back({path, "must be >= 0"});
}

} // namespace

std::vector<FieldError> validate(const DesignSpec& d) {
  std::vector<FieldError> out;

  require_positive(out, "env.air_density", d.env.air_density);
  require_positive(out, "env.helium_density", d.env.helium_density);
  require_positive(out, "env.gravity", d.env.gravity);
  if (d.env.air_density <= d.env.helium_density) {
    out.push_back({"env.helium_density", "must be less than air_density"});
  }

  if (d.thrusters.empty()) out.push_back({"thrusters", "at least one thruster is required"});
  std::set<int> ids;
  std::set<int> ports;
  for (std::size_t i = 0; i < d.thrusters.size(); ++i) {
    const auto& t = d.thrusters[i];
    const std::string p = "thrusters[" + std::to_string(i) + "]";
    if (t.id < 1) out.push_back({p + ".id", "channel index must be >= 1"});
    if (!ids.insert(t.id).second) out.push_back({p + ".id", "duplicate channel id " + std::to_string(t.id)});
    if (!finite3(t.position)) out.push_back({p + ".position", "must be finite"});
    int nonzero = 0;
    bool entries_ok = true;
    for (int k : t.orientation) {
      if (k != 0) ++nonzero;
      if (k < -1 || k > 1) entries_ok = false;
    }
    if (!entries_ok) out.push_back({p + ".orientation", "K_i entries must be in {-1, 0, 1}"});
    if (nonzero != 1) out.push_back({p + ".orientation", "orientation must have exactly one nonzero component"});
    if (!std::isfinite(t.thrust_min) || !std::isfinite(t.thrust_max)) {
      out.push_back({p + ".thrust_range_g", "must be finite"});
    } else if (t.thrust_min > t.thrust_max) {
      out.push_back({p + ".thrust_range_g", "min must not exceed max"});
    }
    if (t.wiring_polarity != 1 && t.wiring_polarity != -1) {
      out.push_back({p + ".wiring_polarity", "must be 1 or -1"});
    }
    if (t.servo_polarity != 1 && t.servo_polarity != -1) {
      out.push_back({p + ".servo_polarity", "must be 1 or -1"});
    }
    if (t.actuator == ActuatorKind::servo_vectored) {
      if (!(t.max_deflection > 0.0 && t.max_deflection <= kPi / 2.0 + 1e-12)) {
        out.push_back({p + ".max_deflection_deg", "must be in (0, 90]"});
      }
      if (t.servo_port < 0 || t.servo_port > 8) out.push_back({p + ".servo_port", "must be in 0..8"});
      if (t.servo_port > 0 && !ports.insert(t.servo_port).second) {
        out.push_back({p + ".servo_port", "servo port already in use"});
      }
    } else if (t.servo_port != 0) {
      out.push_back({p + ".servo_port", "only servo_vectored thrusters take a servo port"});
    }
  }

  const auto& b = d.balloon;
  require_positive(out, "balloon.envelope_2d[0]", b.deflated_a);
  require_positive(out, "balloon.envelope_2d[1]", b.deflated_b);
  if (b.shape == BalloonShape::sphere && b.deflated_a != b.deflated_b) {
    out.push_back({"balloon.envelope_2d", "sphere envelope must be circular (a == b)"});
  }
  if (b.inflated_semi_axes) {
    for (int k = 0; k < 3; ++k) {
      require_positive(out, "balloon.inflated_semi_axes[" + std::to_string(k) + "]", (*b.inflated_semi_axes)[k]);
    }
  }
  require_nonnegative(out, "balloon.envelope_mass", b.envelope_mass);
  require_positive(out, "balloon.flatness_ratio", b.flatness_ratio);

  require_nonnegative(out, "masses.electronics", d.masses.electronics);
  require_nonnegative(out, "masses.support", d.masses.support);
  if (d.masses.payload) require_nonnegative(out, "masses.payload", *d.masses.payload);

  require_positive(out, "drag.cd_x", d.drag.cd_x);
  require_positive(out, "drag.cd_y", d.drag.cd_y);
  require_positive(out, "drag.cd_z", d.drag.cd_z);
  require_positive(out, "drag.csa_yz", d.drag.csa_yz);
  require_positive(out, "drag.csa_xz", d.drag.csa_xz);
  require_positive(out, "drag.csa_xy", d.drag.csa_xy);

  if (d.hardware) {
    const auto& h = *d.hardware;
    require_positive(out, "hardware.propeller_diameter", h.propeller_diameter);
    require_positive(out, "hardware.motor_length", h.motor_length);
    require_positive(out, "hardware.motor_diameter", h.motor_diameter);
    for (int k = 0; k < 3; ++k) {
      require_positive(out, "hardware.board_dims[" + std::to_string(k) + "]", h.board_dims[k]);
    }
  }
  return out;
}

void validate_or_throw(const DesignSpec& design) {
  auto errors = validate(design);
  if (!errors.empty()) throw DesignError(DesignError::Kind::invariant, std::move(errors));
}

namespace {

bool close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

bool close3(const Vec3& a, const Vec3& b, double rel) {
  return close(a.x(), b.x(), rel) && close(a.y(), b.y(), rel) && close(a.z(), b.z(), rel);
}

} // namespace

bool approx_equal(const DesignSpec& a, const DesignSpec& b, double rel) {
  if (a.name != b.name || a.thrusters.size() != b.thrusters.size()) return false;
  for (std::size_t i = 0; i < a.thrusters.size(); ++i) {
    const auto& x = a.thrusters[i];
    const auto& y = b.thrusters[i];
    if (x.id != y.id || x.orientation != y.orientation || x.actuator != y.actuator ||
        x.wiring_polarity != y.wiring_polarity || x.servo_port != y.servo_port ||
        x.servo_polarity != y.servo_polarity) {
      return false;
    }
    if (!close3(x.position, y.position, rel) || !close(x.thrust_min, y.thrust_min, rel) ||
        !close(x.thrust_max, y.thrust_max, rel) || !close(x.max_deflection, y.max_deflection, rel)) {
      return false;
    }
  }
  const auto& p = a.balloon;
  const auto& q = b.balloon;
  if (p.shape != q.shape || !close(p.deflated_a, q.deflated_a, rel) || !close(p.deflated_b, q.deflated_b, rel) ||
      !close(p.envelope_mass, q.envelope_mass, rel) || !close(p.flatness_ratio, q.flatness_ratio, rel) ||
      p.inflated_semi_axes.has_value() != q.inflated_semi_axes.has_value()) {
    return false;
  }
  if (p.inflated_semi_axes && !close3(*p.inflated_semi_axes, *q.inflated_semi_axes, rel)) return false;
  if (!close(a.masses.electronics, b.masses.electronics, rel) || !close(a.masses.support, b.masses.support, rel) ||
      a.masses.payload.has_value() != b.masses.payload.has_value()) {
    return false;
  }
  if (a.masses.payload && !close(*a.masses.payload, *b.masses.payload, rel)) return false;
  const auto& r = a.drag;
  const auto& s = b.drag;
  if (!close(r.cd_x, s.cd_x, rel) || !close(r.cd_y, s.cd_y, rel) || !close(r.cd_z, s.cd_z, rel) ||
      !close(r.csa_yz, s.csa_yz, rel) || !close(r.csa_xz, s.csa_xz, rel) || !close(r.csa_xy, s.csa_xy, rel)) {
    return false;
  }
  if (!close(a.env.air_density, b.env.air_density, rel) || !close(a.env.helium_density, b.env.helium_density, rel) ||
      !close(a.env.gravity, b.env.gravity, rel)) {
    return false;
  }
  if (a.hardware.has_value() != b.hardware.has_value()) return false;
  if (a.hardware) {
    const auto& h = *a.hardware;
    const auto& k = *b.hardware;
    if (!close(h.propeller_diameter, k.propeller_diameter, rel) || !close(h.motor_length, k.motor_length, rel) ||
        !close(h.motor_diameter, k.motor_diameter, rel) || !close3(h.board_dims, k.board_dims, rel)) {
      return false;
    }
  }
  return true;
}

const char* to_string(ActuatorKind kind) {
  return kind == ActuatorKind::dc_motor ? "dc_motor" : "servo_vectored";
}

const char* to_string(BalloonShape shape) {
  switch (shape) {
    case BalloonShape::sphere: return "sphere";
    case BalloonShape::saucer: return "saucer";
    case BalloonShape::oval: return "oval";
    case BalloonShape::irregular_oval: return "irregular_oval";
  }
  return "sphere";
}

std::optional<ActuatorKind> actuator_from_string(std::string_view s) {
  if (s == "dc_motor") return ActuatorKind::dc_motor;
  if (s == "servo_vectored") return ActuatorKind::servo_vectored;
  return std::nullopt;
}

std::optional<BalloonShape> shape_from_string(std::string_view s) {
  if (s == "sphere") return BalloonShape::sphere;
  if (s == "saucer") return BalloonShape::saucer;
  if (s == "oval") return BalloonShape::oval;
  if (s == "irregular_oval") return BalloonShape::irregular_oval;
  return std::nullopt;
}

} // namespace blimp
