#include "blimp/report.hpp"

#include <cstdio>
#include <sstream>

#include "blimp/kvdoc.hpp"

namespace blimp {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string vec(const Vec3& v) { return "[" + num(v.x()) + ", " + num(v.y()) + ", " + num(v.z()) + "]"; }

const char* pass(bool ok) { return ok ? "PASS" : "FAIL"; }
const char* yes(bool b) { return b ? "yes" : "no"; }

} // namespace

std::string format_feasibility(const DesignSpec& design, const FeasibilityReport& r) {
  std::ostringstream os;
  os << "design: " << design.name << "\n";
  for (const auto& p : r.primitives) {
    os << to_string(p.primitive) << ": " << pass(p.achievable);
    if (p.achievable) {
      os << " (target " << num(p.target) << ")";
      if (p.primitive == Primitive::altitude) {
        os << " ascend " << yes(p.negative_ok) << ", descend " << yes(p.positive_ok);
      }
    }
    os << "\n";
  }
  os << "naive: F_px " << yes(r.naive.fx_nonzero) << ", F_pz " << yes(r.naive.fz_nonzero) << ", M_pz "
     << yes(r.naive.mz_nonzero) << "\n";
  os << "motion: " << pass(r.motion_ok()) << "\n";
  os << "payload: " << pass(r.payload_ok) << " (" << num(r.payload_mass) << " kg)\n";
  return os.str();
}

std::string format_payload(const DesignSpec& design, const FeasibilityReport& r) {
  const EnvelopeGeometry g = inflate_envelope(design.balloon);
  std::ostringstream os;
  os << "semi_axes_m: " << vec(g.semi_axes) << "\n";
  os << "volume_m3: " << num(r.envelope_volume) << "\n";
  os << "buoyancy_n: " << num(r.buoyancy) << "\n";
  os << "payload_kg: " << num(r.payload_mass) << "\n";
  os << "payload: " << pass(r.payload_ok) << "\n";
  return os.str();
}

std::string format_performance(const MaxPerformance& p) {
  std::ostringstream os;
  const auto block = [&](const char* name, const PerformanceReport& r) {
    os << name << ".net_propulsion_n: " << vec(r.net_propulsion) << "\n";
    os << name << ".terminal_drag_n: " << vec(r.terminal_drag) << "\n";
    os << name << ".v_max_body_mps: " << vec(r.v_max_body) << "\n";
  };
  block("horizontal", p.horizontal);
  block("vertical", p.vertical);
  os << "v_max_horizontal_mps: " << num(p.v_max_horizontal) << "\n";
  os << "v_max_vertical_mps: " << num(p.v_max_vertical) << "\n";
  return os.str();
}

std::string format_command(const control::MappingCommand& c) {
  using namespace control;
  std::ostringstream os;
  os << "command = \"" << render_command(c) << "\"\n";
  const char* mode = c.mode == RotationMode::dc ? "dc" : c.mode == RotationMode::servo ? "servo" : "unconfirmed";
  os << "mode = \"" << mode << "\"\n\n[roles]\n";
  for (int ch = 1; ch <= kMotorChannels; ++ch) os << ch << " = \"" << static_cast<char>(c.role(ch)) << "\"\n";
  if (c.mode == RotationMode::dc) {
    os << "\n[rotation]\nleft = " << c.left << "\nright = " << c.right << "\n";
  } else if (c.mode == RotationMode::servo) {
    const bool lr = c.order == ServoOrder::left_right;
    os << "\n[rotation]\nservo_a = " << c.servo_a << "\nservo_b = " << c.servo_b << "\norder = \""
       << (lr ? "LR" : "RL") << "\"\nleft_servo = " << (lr ? c.servo_a : c.servo_b)
       << "\nright_servo = " << (lr ? c.servo_b : c.servo_a) << "\n";
  }
  return os.str();
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const PrimitiveCertificate& c) {
  json j{{"primitive", to_string(c.primitive)},
         {"achievable", c.achievable},
         {"positive_ok", c.positive_ok},
         {"negative_ok", c.negative_ok},
         {"target", c.target}};
  j["witness_thrusts"] = c.witness_thrusts ? json(*c.witness_thrusts) : json(nullptr);
  if (!c.witness_deflections.empty()) j["witness_deflections"] = c.witness_deflections;
  return j;
}

json to_json(const FeasibilityReport& r) {
  json prims = json::array();
  for (const auto& p : r.primitives) prims.push_back(to_json(p));
  return {{"primitives", prims},
          {"motion_ok", r.motion_ok()},
          {"naive_check",
           {{"fx_nonzero", r.naive.fx_nonzero}, {"fz_nonzero", r.naive.fz_nonzero}, {"mz_nonzero", r.naive.mz_nonzero}}},
          {"envelope_volume", r.envelope_volume},
          {"buoyancy", r.buoyancy},
          {"payload_mass", r.payload_mass},
          {"payload_ok", r.payload_ok}};
}

json to_json(const PerformanceReport& r) {
  return {{"terminal_drag", to_json(r.terminal_drag)},
          {"v_max_body", to_json(r.v_max_body)},
          {"v_terminal_body", to_json(r.v_terminal_body)},
          {"opposed", r.opposed},
          {"attitude_used", {{"roll", r.attitude_used.roll}, {"pitch", r.attitude_used.pitch}, {"yaw", r.attitude_used.yaw}}},
          {"net_propulsion", to_json(r.net_propulsion)}};
}

json to_json(const MaxPerformance& p) {
  return {{"horizontal", to_json(p.horizontal)},
          {"vertical", to_json(p.vertical)},
          {"v_max_horizontal", p.v_max_horizontal},
          {"v_max_vertical", p.v_max_vertical}};
}

json to_json(const SimState& s) {
  return {{"time", s.time},
          {"position", to_json(s.position)},
          {"velocity", to_json(s.velocity)},
          {"speed", s.velocity.norm()},
          {"horizontal_speed", s.horizontal_speed()},
          {"yaw", s.yaw},
          {"yaw_rate", s.yaw_rate},
          {"roll", s.roll},
          {"pitch", s.pitch}};
}

json to_json(const control::Verdicts& v) {
  return {{"horizontal", v.horizontal}, {"vertical", v.vertical}, {"rotation", v.rotation}};
}

json to_json(const control::MappingCommand& c) {
  using namespace control;
  json roles = json::object();
  for (int ch = 1; ch <= kMotorChannels; ++ch) roles[std::to_string(ch)] = std::string(1, static_cast<char>(c.role(ch)));
  json j{{"command", render_command(c)}, {"roles", roles}};
  switch (c.mode) {
    case RotationMode::unconfirmed: j["mode"] = "unconfirmed"; break;
    case RotationMode::dc:
      j["mode"] = "dc";
      j["rotation"] = {{"left", c.left}, {"right", c.right}};
      break;
    case RotationMode::servo: {
      const bool lr = c.order == ServoOrder::left_right;
      j["mode"] = "servo";
      j["rotation"] = {{"servo_a", c.servo_a},
                       {"servo_b", c.servo_b},
                       {"order", lr ? "LR" : "RL"},
                       {"left_servo", lr ? c.servo_a : c.servo_b},
                       {"right_servo", lr ? c.servo_b : c.servo_a}};
      break;
    }
  }
  return j;
}

json to_json(const SessionSnapshot& s) {
  json j{{"state", to_json(s.state)},
         {"steady", s.steady},
         {"mapping", {{"command", s.command}, {"iteration", control::to_string(s.iteration)}}},
         {"verdicts", to_json(s.verdicts)},
         {"input", {{"x", s.input.x}, {"y", s.input.y}, {"z", s.input.z}, {"slider", s.input.slider}}}};
  j["error"] = s.error.empty() ? json(nullptr) : json(s.error);
  return j;
}

} // namespace blimp
