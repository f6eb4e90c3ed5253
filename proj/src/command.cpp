#include <string>

#include "blimp/control.hpp"

namespace blimp::control {

CommandError::CommandError(Kind kind, int position, const std::string& message)
    : std::runtime_error("position " + std::to_string(position) + ": " + message),
      kind_(kind),
      position_(position),
      detail_(message) {}

namespace {

class CommandParser {
 public:
  explicit CommandParser(std::string_view text) : s_(text) {}

  MappingCommand run() {
    MappingCommand cmd;
    std::array<bool, kMotorChannels> seen{};
    for (int k = 0; k < kMotorChannels; ++k) {
      const int at = pos_;
      const int channel = digit(1, kMotorChannels, "channel digit 1-4");
      if (seen[channel - 1]) {
        throw CommandError(CommandError::Kind::duplicate_channel, at + 1,
                           "channel " + std::to_string(channel) + " assigned twice");
      }
      seen[channel - 1] = true;
      cmd.roles[channel - 1] = role();
    }
    tail(cmd);
    if (pos_ < static_cast<int>(s_.size())) {
      throw CommandError(CommandError::Kind::dangling_tail, pos_ + 1, "unexpected characters after rotation tail");
    }
    return cmd;
  }

 private:
  std::string_view s_;
  int pos_ = 0;

  bool eof() const { return pos_ >= static_cast<int>(s_.size()); }

  [[noreturn]] void lexical(const std::string& expected) const {
    if (eof()) throw CommandError(CommandError::Kind::lexical, pos_ + 1, "unexpected end of command, expected " + expected);
    const unsigned char c = static_cast<unsigned char>(s_[pos_]);
    std::string shown = (c >= 0x20 && c < 0x7f) ? std::string(1, static_cast<char>(c)) : "\\x" + std::to_string(c);
    throw CommandError(CommandError::Kind::lexical, pos_ + 1, "unexpected '" + shown + "', expected " + expected);
  }

  int digit(int lo, int hi, const std::string& expected) {
    if (eof() || s_[pos_] < '0' + lo || s_[pos_] > '0' + hi) lexical(expected);
    return s_[pos_++] - '0';
  }

  void literal(char c) {
    if (eof() || s_[pos_] != c) lexical(std::string("'") + c + "'");
    ++pos_;
  }

  Role role() {
    if (eof()) lexical("role letter F, B, U, D or N");
    const char c = s_[pos_];
    switch (c) {
      case 'F': ++pos_; return Role::forward;
      case 'B': ++pos_; return Role::backward;
      case 'U': ++pos_; return Role::up;
      case 'D': ++pos_; return Role::down;
      case 'N': ++pos_; return Role::none;
      default: break;
    }
    if (c >= 'A' && c <= 'Z') {
      throw CommandError(CommandError::Kind::unknown_role, pos_ + 1, std::string("unknown role letter '") + c + "'");
    }
    lexical("role letter F, B, U, D or N");
  }

  void tail(MappingCommand& cmd) {
    if (eof()) lexical("rotation tail N, C or S");
    const char c = s_[pos_];
    if (c == 'N') {
      ++pos_;
      cmd.mode = RotationMode::unconfirmed;
      return;
    }
    if (c == 'C') {
      ++pos_;
      cmd.mode = RotationMode::dc;
      const int left_at = pos_;
      cmd.left = digit(1, kMotorChannels, "left rotation channel 1-4");
      literal('L');
      const int right_at = pos_;
      cmd.right = digit(1, kMotorChannels, "right rotation channel 1-4");
      literal('R');
      if (cmd.left == cmd.right) {
        throw CommandError(CommandError::Kind::invalid_reference, right_at + 1,
                           "left and right rotation channels must differ");
      }
      if (cmd.role(cmd.left) == Role::none) {
        throw CommandError(CommandError::Kind::invalid_reference, left_at + 1,
                           "rotation channel " + std::to_string(cmd.left) + " has no role");
      }
      if (cmd.role(cmd.right) == Role::none) {
        throw CommandError(CommandError::Kind::invalid_reference, right_at + 1,
                           "rotation channel " + std::to_string(cmd.right) + " has no role");
      }
      return;
    }
    if (c == 'S') {
      ++pos_;
      cmd.mode = RotationMode::servo;
      cmd.servo_a = digit(1, kServoPorts, "servo port 1-8");
      const int b_at = pos_;
      cmd.servo_b = digit(1, kServoPorts, "servo port 1-8");
      if (cmd.servo_a == cmd.servo_b) {
        throw CommandError(CommandError::Kind::invalid_reference, b_at + 1, "servo ports must differ");
      }
      literal('M');
      if (s_.substr(pos_, 2) == "LR") {
        cmd.order = ServoOrder::left_right;
      } else if (s_.substr(pos_, 2) == "RL") {
        cmd.order = ServoOrder::right_left;
      } else if (!eof() && s_[pos_] == 'L') {
        ++pos_;
        lexical("'R'");
      } else if (!eof() && s_[pos_] == 'R') {
        ++pos_;
        lexical("'L'");
      } else {
        lexical("servo order LR or RL");
      }
      pos_ += 2;
      return;
    }
    lexical("rotation tail N, C or S");
  }
};

} // namespace

MappingCommand parse_command(std::string_view text) { return CommandParser(text).run(); }

std::string render_command(const MappingCommand& cmd) {
  std::string out;
  for (int ch = 1; ch <= kMotorChannels; ++ch) {
    out.push_back(static_cast<char>('0' + ch));
    out.push_back(static_cast<char>(cmd.role(ch)));
  }
  switch (cmd.mode) {
    case RotationMode::unconfirmed: out.push_back('N'); break;
    case RotationMode::dc:
      out += 'C' + std::to_string(cmd.left) + 'L' + std::to_string(cmd.right) + 'R';
      break;
    case RotationMode::servo:
      out += 'S' + std::to_string(cmd.servo_a) + std::to_string(cmd.servo_b) + 'M';
      out += cmd.order == ServoOrder::left_right ? "LR" : "RL";
      break;
  }
  return out;
}

} // namespace blimp::control
