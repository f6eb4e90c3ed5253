#include <algorithm>
#include <string>

#include "blimp/control.hpp"

namespace blimp::control {

void JoystickInput::validate() const {
  const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!in(x, -1.0, 1.0)) throw std::out_of_range("x must be in [-1, 1]");
  if (!in(y, -1.0, 1.0)) throw std::out_of_range("y must be in [-1, 1]");
  if (!in(z, -1.0, 1.0)) throw std::out_of_range("z must be in [-1, 1]");
  if (!in(slider, 0.0, 1.0)) throw std::out_of_range("slider must be in [0, 1]");
}

ChannelMapping ChannelMapping::from_command(const MappingCommand& cmd) {
  ChannelMapping m;
  for (int ch = 1; ch <= kMotorChannels; ++ch) {
    switch (cmd.role(ch)) {
      case Role::forward: m.forward_channels.push_back(ch); break;
      case Role::backward: m.backward_channels.push_back(ch); break;
      case Role::up: m.up_channels.push_back(ch); break;
      case Role::down: m.down_channels.push_back(ch); break;
      case Role::none: break;
    }
  }
  switch (cmd.mode) {
    case RotationMode::unconfirmed: break;
    case RotationMode::dc:
      for (int ch : {cmd.left, cmd.right}) {
        if (ch < 1 || ch > kMotorChannels || cmd.role(ch) == Role::none) {
          throw CommandError(CommandError::Kind::invalid_reference, 0,
                             "rotation channel " + std::to_string(ch) + " has no role");
        }
      }
      m.yaw_left = cmd.left;
      m.yaw_right = cmd.right;
      m.rotation_confirmed = true;
      break;
    case RotationMode::servo:
      m.servo_mode = true;
      m.rotation_confirmed = true;
      if (cmd.order == ServoOrder::left_right) {
        m.yaw_left = cmd.servo_a;
        m.yaw_right = cmd.servo_b;
      } else {
        m.yaw_left = cmd.servo_b;
        m.yaw_right = cmd.servo_a;
      }
      break;
  }
  return m;
}

namespace {
bool contains(const std::vector<int>& v, int ch) { return std::find(v.begin(), v.end(), ch) != v.end(); }
} // namespace

int ChannelMapping::polarity(int ch) const {
  if (contains(forward_channels, ch) || contains(up_channels, ch)) return 1;
  if (contains(backward_channels, ch) || contains(down_channels, ch)) return -1;
  return 0;
}

bool ChannelMapping::horizontal(int ch) const {
  return contains(forward_channels, ch) || contains(backward_channels, ch);
}

bool ChannelMapping::vertical(int ch) const { return contains(up_channels, ch) || contains(down_channels, ch); }

MixerOutput mix(const ChannelMapping& mapping, const JoystickInput& in) {
  in.validate();
  const double s = in.slider;
  // Stick intent per channel before the role's sign is applied.
  std::array<double, kMotorChannels> intent{};
  for (int ch = 1; ch <= kMotorChannels; ++ch) {
    if (mapping.horizontal(ch)) intent[ch - 1] = in.y * s;
    else if (mapping.vertical(ch)) intent[ch - 1] = in.z * s;
  }
  MixerOutput out;
  if (mapping.rotation_confirmed && !mapping.servo_mode) {
    intent[mapping.yaw_left - 1] += in.x * s;
    intent[mapping.yaw_right - 1] -= in.x * s;
  } else if (mapping.rotation_confirmed) {
    out.servos[mapping.yaw_left - 1] = in.x;
    out.servos[mapping.yaw_right - 1] = -in.x;
  }
  for (int ch = 1; ch <= kMotorChannels; ++ch) {
    out.duties[ch - 1] = std::clamp(mapping.polarity(ch) * intent[ch - 1], -1.0, 1.0);
  }
  return out;
}

Actuation route(const DesignSpec& design, const MixerOutput& output) {
  Actuation a;
  a.duties.reserve(design.thrusters.size());
  bool any_servo = false;
  for (const auto& t : design.thrusters) {
    a.duties.push_back(t.id >= 1 && t.id <= kMotorChannels ? output.duties[t.id - 1] : 0.0);
    any_servo = any_servo || (t.actuator == ActuatorKind::servo_vectored && t.servo_port > 0);
  }
  if (any_servo) {
    for (const auto& t : design.thrusters) {
      const bool driven = t.actuator == ActuatorKind::servo_vectored && t.servo_port >= 1 && t.servo_port <= kServoPorts;
      a.deflections.push_back(driven ? output.servos[t.servo_port - 1] : 0.0);
    }
  }
  return a;
}

} // namespace blimp::control
