#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "blimp/control.hpp"
#include "blimp/simulator.hpp"

namespace blimp {

/// Consistent copy of a session taken under its lock.
struct SessionSnapshot {
  SimState state;
  bool steady = false;
  std::string command;
  control::RemapIteration iteration = control::RemapIteration::init;
  control::Verdicts verdicts;
  control::JoystickInput input;
  std::string error; // set once the simulation diverged; the session then stops
};

/// Interactive flight session: joystick input runs through the current
/// mapping command and the design's (hidden) wiring into the simulator.
///
/// All public members are thread-safe. In realtime mode a worker thread
/// advances one dt per dt of wall-clock time until the session is destroyed.
class SimSession {
 public:
  enum class Clock { stepped, realtime };

  SimSession(DesignSpec design, SimConfig config = {}, Clock clock = Clock::stepped);
  ~SimSession();
  SimSession(const SimSession&) = delete;
  SimSession& operator=(const SimSession&) = delete;

  /// Throws std::out_of_range for out-of-range inputs.
  void set_input(const control::JoystickInput& input);
  SessionSnapshot snapshot() const;

  /// One remap iteration; throws RemapError.
  control::RemapSession::StepResult remap(const control::MappingCommand& command);

  /// Advances n ticks (either clock mode).
  void advance(int n);

  Clock clock() const { return clock_; }
  const SimConfig& config() const { return config_; }

 private:
  void tick_locked();

  const SimConfig config_;
  const Clock clock_;
  mutable std::mutex mu_;
  control::RemapSession remap_;
  control::ChannelMapping mapping_;
  control::JoystickInput input_;
  SimState state_;
  SteadyStateDetector detector_;
  std::string error_;
  std::jthread worker_;
};

/// Owns live sessions by id.
class SessionManager {
 public:
  explicit SessionManager(SimSession::Clock clock = SimSession::Clock::realtime) : clock_(clock) {}

  std::string create(DesignSpec design, SimConfig config = {});
  std::shared_ptr<SimSession> find(const std::string& id) const;
  bool erase(const std::string& id);
  std::size_t size() const;

 private:
  SimSession::Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<SimSession>> sessions_;
  unsigned long next_ = 1;
};

} // namespace blimp
