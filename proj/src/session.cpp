#include "blimp/session.hpp"

#include <chrono>

namespace blimp {

SimSession::SimSession(DesignSpec design, SimConfig config, Clock clock)
    : config_(config),
      clock_(clock),
      remap_(std::move(design)),
      mapping_(control::ChannelMapping::from_command(remap_.command())),
      detector_(config.steady_state_window, config.steady_state_eps) {
  config_.validate();
  detector_.push(state_.time, state_.velocity.norm());
  if (clock_ == Clock::realtime) {
    worker_ = std::jthread([this](std::stop_token stop) {
      using clock = std::chrono::steady_clock;
      const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(config_.dt));
      auto next = clock::now() + period;
      while (!stop.stop_requested()) {
        std::this_thread::sleep_until(next);
        next += period;
        std::lock_guard lock(mu_);
        tick_locked();
      }
    });
  }
}

SimSession::~SimSession() {
  if (worker_.joinable()) {
    worker_.request_stop();
    worker_.join();
  }
}

void SimSession::set_input(const control::JoystickInput& input) {
  input.validate();
  std::lock_guard lock(mu_);
  input_ = input;
}

SessionSnapshot SimSession::snapshot() const {
  std::lock_guard lock(mu_);
  SessionSnapshot s;
  s.state = state_;
  s.steady = detector_.steady();
  s.command = control::render_command(remap_.command());
  s.iteration = remap_.iteration();
  s.verdicts = remap_.verdicts();
  s.input = input_;
  s.error = error_;
  return s;
}

control::RemapSession::StepResult SimSession::remap(const control::MappingCommand& command) {
  std::lock_guard lock(mu_);
  auto result = remap_.step(command);
  mapping_ = control::ChannelMapping::from_command(remap_.command());
  return result;
}

void SimSession::advance(int n) {
  std::lock_guard lock(mu_);
  for (int i = 0; i < n; ++i) tick_locked();
}

void SimSession::tick_locked() {
  if (!error_.empty()) return;
  const Plant& plant = remap_.plant();
  try {
    const Actuation a = control::route(plant.design(), control::mix(mapping_, input_));
    state_ = plant.step(state_, a, config_);
  } catch (const std::exception& e) {
    error_ = e.what();
    return;
  }
  detector_.push(state_.time, state_.velocity.norm());
}

std::string SessionManager::create(DesignSpec design, SimConfig config) {
  auto session = std::make_shared<SimSession>(std::move(design), config, clock_);
  std::lock_guard lock(mu_);
  std::string id = "s" + std::to_string(next_++);
  sessions_.emplace(id, std::move(session));
  return id;
}

std::shared_ptr<SimSession> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool SessionManager::erase(const std::string& id) {
  std::shared_ptr<SimSession> doomed;
  {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    doomed = std::move(it->second);
    sessions_.erase(it);
  }
  return true; // worker joins outside the manager lock
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

} // namespace blimp
