#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "blimp/design_file.hpp"

namespace blimp::testing {

inline std::string fixture_path(const std::string& name) { return std::string(BLIMP_FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline DesignSpec load_fixture(const std::string& name) { return parse_design(read_file(fixture_path(name))); }

/// Minimal valid design shell (sphere, neutral trim) for hand-built cases.
inline DesignSpec shell_design() {
  DesignSpec d;
  d.name = "shell";
  d.balloon.shape = BalloonShape::sphere;
  d.balloon.deflated_a = d.balloon.deflated_b = 0.5;
  d.balloon.envelope_mass = 0.02;
  d.masses.electronics = 0.02;
  d.masses.support = 0.01;
  d.drag = {0.47, 0.5, 0.6, 0.1, 0.12, 0.2};
  return d;
}

inline ThrusterSpec thruster(int id, Vec3 pos, std::array<int, 3> k, double lo, double hi) {
  ThrusterSpec t;
  t.id = id;
  t.position = pos;
  t.orientation = k;
  t.thrust_min = lo;
  t.thrust_max = hi;
  return t;
}

/// Random design passing all three motion primitives: a yaw pair of
/// forward thrusters offset in y plus a vertical thruster, with random
/// bounds, drag, balloon and (possibly non-neutral) carried payload.
inline DesignSpec random_feasible_design(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  DesignSpec d = shell_design();
  d.name = "random";
  d.balloon.deflated_a = d.balloon.deflated_b = range(0.35, 0.6);
  d.drag = {range(0.3, 0.9), range(0.3, 0.9), range(0.3, 0.9), range(0.05, 0.3), range(0.05, 0.3), range(0.05, 0.3)};
  const double fmax = range(0.03, 0.2);
  const double y = range(0.05, 0.2);
  d.thrusters.push_back(thruster(1, {0, y, 0.05}, {1, 0, 0}, -fmax, fmax));
  d.thrusters.push_back(thruster(2, {0, -y, 0.05}, {1, 0, 0}, -fmax, fmax));
  d.thrusters.push_back(thruster(3, {0, 0, 0.05}, {0, 0, -1}, -fmax, range(0.5, 1.0) * fmax));
  return d;
}

} // namespace blimp::testing
