#include "blimp/design_file.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace blimp {

namespace {

constexpr double kDeg = kPi / 180.0;

class SectionReader {
 public:
  SectionReader(const kv::Table* table, std::string path, std::vector<FieldError>& errors)
      : table_(table), path_(std::move(path)), errors_(errors) {}

  bool present() const { return table_ != nullptr; }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const kv::Value* take(std::string_view key) {
    if (!table_) return nullptr;
    const kv::Value* v = table_->find(key);
    if (v) used_.insert(std::string(key));
    return v;
  }

  void missing(std::string_view key) { errors_.push_back({field(key), "missing required key"}); }

  std::optional<double> number(std::string_view key, bool required) {
    const kv::Value* v = take(key);
    if (!v) {
      if (required) missing(key);
      return std::nullopt;
    }
    if (!v->is_number()) {
      errors_.push_back({field(key), "expected a number"});
      return std::nullopt;
    }
    return std::get<double>(v->data);
  }

  std::optional<int> integer(std::string_view key, bool required) {
    const kv::Value* v = take(key);
    if (!v) {
      if (required) missing(key);
      return std::nullopt;
    }
    if (!v->is_number() || !v->integral) {
      errors_.push_back({field(key), "expected an integer"});
      return std::nullopt;
    }
    return static_cast<int>(std::get<double>(v->data));
  }

  std::optional<std::string> string(std::string_view key, bool required) {
    const kv::Value* v = take(key);
    if (!v) {
      if (required) missing(key);
      return std::nullopt;
    }
    if (!v->is_string()) {
      errors_.push_back({field(key), "expected a string"});
      return std::nullopt;
    }
    return std::get<std::string>(v->data);
  }

  std::optional<std::vector<double>> numbers(std::string_view key, std::size_t n, bool required, bool integral = false) {
    const kv::Value* v = take(key);
    if (!v) {
      if (required) missing(key);
      return std::nullopt;
    }
    if (!v->is_array()) {
      errors_.push_back({field(key), "expected an array of " + std::to_string(n) + " numbers"});
      return std::nullopt;
    }
    const auto& arr = std::get<kv::Array>(v->data);
    if (arr.size() != n) {
      errors_.push_back({field(key), "expected " + std::to_string(n) + " elements, got " + std::to_string(arr.size())});
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : arr) {
      if (!e.is_number() || (integral && !e.integral)) {
        errors_.push_back({field(key), integral ? "expected integer elements" : "expected numeric elements"});
        return std::nullopt;
      }
      out.push_back(std::get<double>(e.data));
    }
    return out;
  }

  /// Reads `key` (base unit) or `key<suffix>` (scaled by `scale`), not both.
  std::optional<double> scaled(std::string_view key, std::string_view suffix, double scale, bool required) {
    const std::string alt = std::string(key) + std::string(suffix);
    const bool has_base = table_ && table_->contains(key);
    const bool has_alt = table_ && table_->contains(alt);
    if (has_base && has_alt) {
      take(key);
      take(alt);
      errors_.push_back({field(key), "both '" + std::string(key) + "' and '" + alt + "' given"});
      return std::nullopt;
    }
    if (has_alt) {
      auto v = number(alt, true);
      if (v) *v *= scale;
      return v;
    }
    return number(key, required);
  }

  std::optional<std::vector<double>> scaled_numbers(std::string_view key, std::string_view suffix, double scale,
                                                    std::size_t n, bool required) {
    const std::string alt = std::string(key) + std::string(suffix);
    const bool has_base = table_ && table_->contains(key);
    const bool has_alt = table_ && table_->contains(alt);
    if (has_base && has_alt) {
      take(key);
      take(alt);
      errors_.push_back({field(key), "both '" + std::string(key) + "' and '" + alt + "' given"});
      return std::nullopt;
    }
    if (has_alt) {
      auto v = numbers(alt, n, true);
      if (v) {
        for (auto& x : *v) x *= scale;
      }
      return v;
    }
    return numbers(key, n, required);
  }

  void finish() {
    if (!table_) return;
    for (const auto& [k, v] : table_->entries) {
      if (!used_.count(k)) errors_.push_back({field(k), "unknown key"});
    }
  }

 private:
  const kv::Table* table_;
  std::string path_;
  std::vector<FieldError>& errors_;
  std::set<std::string> used_;
};

Vec3 to_vec3(const std::vector<double>& v) { return Vec3(v[0], v[1], v[2]); }

} // namespace

DesignSpec design_from_document(const kv::Document& doc) {
  std::vector<FieldError> errors;
  DesignSpec d;

  for (const auto& [name, table] : doc.tables) {
    if (name != "env" && name != "balloon" && name != "masses" && name != "drag" && name != "hardware") {
      errors.push_back({name, "unknown section"});
    }
  }
  for (const auto& [name, tables] : doc.table_arrays) {
    if (name != "thrusters") errors.push_back({name, "unknown section"});
  }

  SectionReader root(&doc.root, "", errors);
  if (auto n = root.string("name", true)) d.name = *n;
  root.finish();

  SectionReader env(doc.table("env"), "env", errors);
  if (auto v = env.number("air_density", false)) d.env.air_density = *v;
  if (auto v = env.number("helium_density", false)) d.env.helium_density = *v;
  if (auto v = env.number("gravity", false)) d.env.gravity = *v;
  env.finish();

  if (!doc.table("balloon")) errors.push_back({"balloon", "missing required section"});
  SectionReader balloon(doc.table("balloon"), "balloon", errors);
  if (balloon.present()) {
    if (auto s = balloon.string("shape", true)) {
      if (auto shape = shape_from_string(*s)) {
        d.balloon.shape = *shape;
      } else {
        errors.push_back({"balloon.shape", "unknown shape '" + *s + "'"});
      }
    }
    if (auto v = balloon.scaled_numbers("envelope_2d", "_mm", 1e-3, 2, true)) {
      d.balloon.deflated_a = (*v)[0];
      d.balloon.deflated_b = (*v)[1];
    }
    if (auto v = balloon.scaled_numbers("inflated_semi_axes", "_mm", 1e-3, 3, false)) {
      d.balloon.inflated_semi_axes = to_vec3(*v);
    }
    if (auto v = balloon.scaled("envelope_mass", "_g", 1e-3, true)) d.balloon.envelope_mass = *v;
    d.balloon.flatness_ratio = default_flatness_ratio(d.balloon.shape);
    if (auto v = balloon.number("flatness_ratio", false)) d.balloon.flatness_ratio = *v;
    balloon.finish();
  }

  if (!doc.table("masses")) errors.push_back({"masses", "missing required section"});
  SectionReader masses(doc.table("masses"), "masses", errors);
  if (masses.present()) {
    if (auto v = masses.scaled("electronics", "_g", 1e-3, true)) d.masses.electronics = *v;
    if (auto v = masses.scaled("support", "_g", 1e-3, true)) d.masses.support = *v;
    d.masses.payload = masses.scaled("payload", "_g", 1e-3, false);
    masses.finish();
  }

  if (!doc.table("drag")) errors.push_back({"drag", "missing required section"});
  SectionReader drag(doc.table("drag"), "drag", errors);
  if (drag.present()) {
    auto read = [&](const char* key, double& dst) {
      if (auto v = drag.number(key, true)) dst = *v;
    };
    read("cd_x", d.drag.cd_x);
    read("cd_y", d.drag.cd_y);
    read("cd_z", d.drag.cd_z);
    read("csa_yz", d.drag.csa_yz);
    read("csa_xz", d.drag.csa_xz);
    read("csa_xy", d.drag.csa_xy);
    drag.finish();
  }

  SectionReader hw(doc.table("hardware"), "hardware", errors);
  if (hw.present()) {
    HardwareDims h;
    if (auto v = hw.scaled("propeller_diameter", "_mm", 1e-3, true)) h.propeller_diameter = *v;
    if (auto v = hw.scaled("motor_length", "_mm", 1e-3, true)) h.motor_length = *v;
    if (auto v = hw.scaled("motor_diameter", "_mm", 1e-3, true)) h.motor_diameter = *v;
    if (auto v = hw.scaled_numbers("board_dims", "_mm", 1e-3, 3, true)) h.board_dims = to_vec3(*v);
    hw.finish();
    d.hardware = h;
  }

  const auto* thrusters = doc.table_array("thrusters");
  if (!thrusters) {
    errors.push_back({"thrusters", "missing required section"});
  } else {
    for (std::size_t i = 0; i < thrusters->size(); ++i) {
      SectionReader r(&(*thrusters)[i], "thrusters[" + std::to_string(i) + "]", errors);
      ThrusterSpec t;
      if (auto v = r.integer("id", true)) t.id = *v;
      if (auto v = r.scaled_numbers("position", "_mm", 1e-3, 3, true)) t.position = to_vec3(*v);
      if (auto v = r.numbers("orientation", 3, true, true)) {
        for (int k = 0; k < 3; ++k) t.orientation[k] = static_cast<int>((*v)[k]);
      }
      if (auto v = r.numbers("thrust_range_g", 2, true)) {
        t.thrust_min = grams_force_to_newtons((*v)[0], d.env.gravity);
        t.thrust_max = grams_force_to_newtons((*v)[1], d.env.gravity);
      }
      if (auto s = r.string("actuator", false)) {
        if (auto kind = actuator_from_string(*s)) {
          t.actuator = *kind;
        } else {
          errors.push_back({r.field("actuator"), "unknown actuator '" + *s + "'"});
        }
      }
      if (auto v = r.integer("wiring_polarity", false)) t.wiring_polarity = *v;
      if (auto v = r.integer("servo_port", false)) t.servo_port = *v;
      if (auto v = r.integer("servo_polarity", false)) t.servo_polarity = *v;
      if (auto v = r.number("max_deflection_deg", false)) t.max_deflection = *v * kDeg;
      r.finish();
      d.thrusters.push_back(t);
    }
  }

  if (!errors.empty()) throw DesignError(DesignError::Kind::schema, std::move(errors));
  validate_or_throw(d);
  return d;
}

DesignSpec parse_design(std::string_view text) {
  kv::Document doc;
  try {
    doc = kv::parse(text);
  } catch (const kv::SyntaxError& e) {
    throw DesignError(DesignError::Kind::syntax, {{"", e.what()}}, e.line(), e.column());
  }
  return design_from_document(doc);
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

// Value u near `guess` with forward(u) == target bit for bit, so a written
// file re-reads to the identical double; falls back to the guess.
template <class F>
double exact_preimage(double target, double guess, F forward) {
  double lo = guess, hi = guess;
  for (int i = 0; i < 8; ++i) {
    if (forward(lo) == target) return lo;
    if (forward(hi) == target) return hi;
    lo = std::nextafter(lo, -HUGE_VAL);
    hi = std::nextafter(hi, HUGE_VAL);
  }
  return guess;
}

std::string grams(double newtons, double gravity) {
  return kv::format_number(exact_preimage(newtons, newtons_to_grams_force(newtons, gravity),
                                          [&](double g) { return grams_force_to_newtons(g, gravity); }));
}

std::string vec(const Vec3& v) {
  return "[" + kv::format_number(v.x()) + ", " + kv::format_number(v.y()) + ", " + kv::format_number(v.z()) + "]";
}

} // namespace

std::string serialize_design(const DesignSpec& d) {
  using kv::format_number;
  std::ostringstream os;
  os << "name = " << quote(d.name) << "\n\n";
  os << "[env]\n"
     << "air_density = " << format_number(d.env.air_density) << "\n"
     << "helium_density = " << format_number(d.env.helium_density) << "\n"
     << "gravity = " << format_number(d.env.gravity) << "\n\n";

  os << "[balloon]\n"
     << "shape = " << quote(to_string(d.balloon.shape)) << "\n"
     << "envelope_2d = [" << format_number(d.balloon.deflated_a) << ", " << format_number(d.balloon.deflated_b)
     << "]\n";
  if (d.balloon.inflated_semi_axes) os << "inflated_semi_axes = " << vec(*d.balloon.inflated_semi_axes) << "\n";
  os << "envelope_mass = " << format_number(d.balloon.envelope_mass) << "\n"
     << "flatness_ratio = " << format_number(d.balloon.flatness_ratio) << "\n\n";

  os << "[masses]\n"
     << "electronics = " << format_number(d.masses.electronics) << "\n"
     << "support = " << format_number(d.masses.support) << "\n";
  if (d.masses.payload) os << "payload = " << format_number(*d.masses.payload) << "\n";
  os << "\n";

  os << "[drag]\n"
     << "cd_x = " << format_number(d.drag.cd_x) << "\n"
     << "cd_y = " << format_number(d.drag.cd_y) << "\n"
     << "cd_z = " << format_number(d.drag.cd_z) << "\n"
     << "csa_yz = " << format_number(d.drag.csa_yz) << "\n"
     << "csa_xz = " << format_number(d.drag.csa_xz) << "\n"
     << "csa_xy = " << format_number(d.drag.csa_xy) << "\n";

  if (d.hardware) {
    const auto& h = *d.hardware;
    os << "\n[hardware]\n"
       << "propeller_diameter = " << format_number(h.propeller_diameter) << "\n"
       << "motor_length = " << format_number(h.motor_length) << "\n"
       << "motor_diameter = " << format_number(h.motor_diameter) << "\n"
       << "board_dims = " << vec(h.board_dims) << "\n";
  }

  for (const auto& t : d.thrusters) {
    os << "\n[[thrusters]]\n"
       << "id = " << t.id << "\n"
       << "position = " << vec(t.position) << "\n"
       << "orientation = [" << t.orientation[0] << ", " << t.orientation[1] << ", " << t.orientation[2] << "]\n"
       << "thrust_range_g = [" << grams(t.thrust_min, d.env.gravity) << ", " << grams(t.thrust_max, d.env.gravity)
       << "]\n"
       << "actuator = " << quote(to_string(t.actuator)) << "\n"
       << "wiring_polarity = " << t.wiring_polarity << "\n";
    if (t.actuator == ActuatorKind::servo_vectored) {
      os << "servo_port = " << t.servo_port << "\n"
         << "servo_polarity = " << t.servo_polarity << "\n"
         << "max_deflection_deg = " << format_number(exact_preimage(t.max_deflection, t.max_deflection / kDeg,
                                                                        [](double deg) { return deg * kDeg; })) << "\n";
    }
  }
  return os.str();
}

} // namespace blimp
