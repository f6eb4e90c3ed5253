#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blimp/design.hpp"
#include "blimp/simulator.hpp"

namespace blimp::control {

inline constexpr int kMotorChannels = 4;
inline constexpr int kServoPorts = 8;

enum class Role : char { forward = 'F', backward = 'B', up = 'U', down = 'D', none = 'N' };
enum class RotationMode : char { unconfirmed = 'N', dc = 'C', servo = 'S' };
enum class ServoOrder { left_right, right_left };

/// Parsed remap command such as "1F2B3U4DN", "1F2F3U4DC1L2R" or
/// "1U2F3N4NS21MLR".
///
///   cmd  := pair pair pair pair tail
///   pair := digit role            digit in 1..4, each channel exactly once
///   tail := 'N'
///         | 'C' digit 'L' digit 'R'
///         | 'S' digit digit 'M' ('LR' | 'RL')   servo digits in 1..8
///
/// 'M' is a literal separator. In the servo tail the first digit steers left
/// under LR and right under RL.
struct MappingCommand {
  std::array<Role, kMotorChannels> roles{Role::none, Role::none, Role::none, Role::none}; // by channel - 1
  RotationMode mode = RotationMode::unconfirmed;
  int left = 0; // dc rotation channels
  int right = 0;
  int servo_a = 0;
  int servo_b = 0;
  ServoOrder order = ServoOrder::left_right;

  Role role(int channel) const { return roles[channel - 1]; }
  bool operator==(const MappingCommand&) const = default;
};

class CommandError : public std::runtime_error {
 public:
  enum class Kind { lexical, duplicate_channel, unknown_role, dangling_tail, invalid_reference };
  CommandError(Kind kind, int position, const std::string& message);
  Kind kind() const { return kind_; }
  /// 1-based character position of the offending input.
  int position() const { return position_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  int position_;
  std::string detail_;
};

MappingCommand parse_command(std::string_view text);
/// Canonical text (pairs in channel order).
std::string render_command(const MappingCommand& command);

/// Joystick panel: horizontal stick (x = yaw, positive turns right; y =
/// forward), vertical stick z (positive climbs), and the power slider.
struct JoystickInput {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double slider = 0.0;

  /// Throws std::out_of_range unless x, y, z in [-1, 1] and slider in [0, 1].
  void validate() const;
};

/// Software view of the wiring, derived from a command.
struct ChannelMapping {
  std::vector<int> forward_channels;
  std::vector<int> backward_channels;
  std::vector<int> up_channels;
  std::vector<int> down_channels;
  int yaw_left = 0;  // dc channel, or servo port in servo mode
  int yaw_right = 0;
  bool servo_mode = false;
  bool rotation_confirmed = false;

  /// Throws CommandError (invalid_reference) when a rotation channel has no
  /// role.
  static ChannelMapping from_command(const MappingCommand& command);

  /// +1 for F/U channels, -1 for B/D, 0 for unassigned.
  int polarity(int channel) const;
  bool horizontal(int channel) const;
  bool vertical(int channel) const;
};

struct MixerOutput {
  std::array<double, kMotorChannels> duties{};
  std::array<double, kServoPorts> servos{}; // normalized deflection commands
};

/// Joystick to per-channel duty. Forward/backward channels take y*slider and
/// up/down channels z*slider, each signed by the channel's role polarity.
/// In dc rotation mode the left channel adds x*slider and the right channel
/// subtracts it (before polarity); results are clamped to [-1, 1]. In servo
/// mode the left servo is commanded +x and the right servo -x.
MixerOutput mix(const ChannelMapping& mapping, const JoystickInput& input);

/// Routes board outputs onto the design's thrusters: thruster `id` reads motor
/// channel `id`, servo-vectored thrusters read their `servo_port`.
Actuation route(const DesignSpec& design, const MixerOutput& output);

// --- Remap procedure ------------------------------------------------------

enum class RemapIteration { init, horizontal_vertical, rotation, done };
const char* to_string(RemapIteration it);

struct Verdicts {
  bool horizontal = false;
  bool vertical = false;
  bool rotation = false;
  bool operator==(const Verdicts&) const = default;
};

/// Probes the plant with full-slider test inputs through the command's mixer:
///  horizontal: forward stick gives F_px >= eps with |F_pz| <= tol;
///  vertical:   climb stick gives -F_pz >= eps with |F_px| <= tol;
///  rotation:   right-yaw stick (plus forward stick in servo mode, where the
///              vectored thrust needs power) gives M_pz >= eps.
/// Rotation is never confirmed for an 'N' tail.
Verdicts probe(const Plant& plant, const MappingCommand& command, double tol = 1e-6);

class RemapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The three-iteration remap procedure against a hidden plant.
///
/// Each step installs the proposed command and probes the plant. The session
/// then advances through every iteration whose check now passes: out of
/// init unconditionally (to horizontal_vertical, or further), out of
/// horizontal_vertical once both translation checks pass, and out of
/// rotation once all three pass.
class RemapSession {
 public:
  explicit RemapSession(DesignSpec design);

  struct StepResult {
    RemapIteration iteration;
    Verdicts verdicts;
    bool advanced;
  };

  /// Throws RemapError if the session is done or, past initialization, when
  /// the command assigns a role or rotation to a channel with no thruster.
  StepResult step(const MappingCommand& proposed);

  RemapIteration iteration() const { return iteration_; }
  const MappingCommand& command() const { return command_; }
  const Verdicts& verdicts() const { return verdicts_; }
  const Plant& plant() const { return plant_; }

 private:
  Plant plant_;
  RemapIteration iteration_ = RemapIteration::init;
  MappingCommand command_;
  Verdicts verdicts_;
};

} // namespace blimp::control
