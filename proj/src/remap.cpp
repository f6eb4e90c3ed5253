#include <string>

#include "blimp/control.hpp"

namespace blimp::control {

const char* to_string(RemapIteration it) {
  switch (it) {
    case RemapIteration::init: return "init";
    case RemapIteration::horizontal_vertical: return "horizontal_vertical";
    case RemapIteration::rotation: return "rotation";
    case RemapIteration::done: return "done";
  }
  return "?";
}

Verdicts probe(const Plant& plant, const MappingCommand& command, double tol) {
  const ChannelMapping mapping = ChannelMapping::from_command(command);
  const auto response = [&](double x, double y, double z) {
    return plant.wrench(route(plant.design(), mix(mapping, {x, y, z, 1.0})));
  };
  const double eps = tol;
  Verdicts v;
  const Wrench h = response(0.0, 1.0, 0.0);
  v.horizontal = h.force.x() >= eps && std::abs(h.force.z()) <= tol;
  const Wrench up = response(0.0, 0.0, 1.0);
  v.vertical = -up.force.z() >= eps && std::abs(up.force.x()) <= tol;
  if (mapping.rotation_confirmed) {
    const Wrench r = response(1.0, mapping.servo_mode ? 1.0 : 0.0, 0.0);
    v.rotation = r.moment.z() >= eps;
  }
  return v;
}

RemapSession::RemapSession(DesignSpec design)
    : plant_(std::move(design)), command_(parse_command("1F2B3U4DN")) {}

RemapSession::StepResult RemapSession::step(const MappingCommand& proposed) {
  if (iteration_ == RemapIteration::done) throw RemapError("remap session is already done");
  if (iteration_ != RemapIteration::init) {
    const auto require = [&](int ch, const char* what) {
      if (plant_.design().find_channel(ch) == nullptr) {
        throw RemapError(std::string(what) + " channel " + std::to_string(ch) + " has no thruster in the design");
      }
    };
    for (int ch = 1; ch <= kMotorChannels; ++ch) {
      if (proposed.role(ch) != Role::none) require(ch, "role");
    }
    if (proposed.mode == RotationMode::dc) {
      require(proposed.left, "rotation");
      require(proposed.right, "rotation");
    }
  }
  command_ = proposed;
  verdicts_ = probe(plant_, command_);

  const RemapIteration start = iteration_;
  if (iteration_ == RemapIteration::init) iteration_ = RemapIteration::horizontal_vertical;
  if (iteration_ == RemapIteration::horizontal_vertical && verdicts_.horizontal && verdicts_.vertical) {
    iteration_ = RemapIteration::rotation;
  }
  if (iteration_ == RemapIteration::rotation && verdicts_.horizontal && verdicts_.vertical && verdicts_.rotation) {
    iteration_ = RemapIteration::done;
  }
  return {iteration_, verdicts_, iteration_ != start};
}

} // namespace blimp::control
