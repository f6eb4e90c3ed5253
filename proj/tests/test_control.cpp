#include <gtest/gtest.h>

#include <random>
#include <set>

#include "blimp/control.hpp"
#include "support.hpp"

using namespace blimp;
using namespace blimp::control;
using blimp::testing::load_fixture;

namespace {

CommandError parse_failure(const std::string& text) {
  try {
    parse_command(text);
  } catch (const CommandError& e) {
    return e;
  }
  ADD_FAILURE() << "expected parse failure for " << text;
  return CommandError(CommandError::Kind::lexical, 0, "");
}

// All canonical valid commands: 5^4 role assignments times every tail.
std::vector<MappingCommand> all_commands() {
  const Role roles[] = {Role::forward, Role::backward, Role::up, Role::down, Role::none};
  std::vector<MappingCommand> out;
  for (int code = 0; code < 625; ++code) {
    MappingCommand base;
    for (int ch = 0, c = code; ch < 4; ++ch, c /= 5) base.roles[ch] = roles[c % 5];
    out.push_back(base);
    for (int l = 1; l <= 4; ++l) {
      for (int r = 1; r <= 4; ++r) {
        if (l == r || base.role(l) == Role::none || base.role(r) == Role::none) continue;
        MappingCommand c = base;
        c.mode = RotationMode::dc;
        c.left = l;
        c.right = r;
        out.push_back(c);
      }
    }
    for (int a = 1; a <= 8; ++a) {
      for (int b = 1; b <= 8; ++b) {
        if (a == b) continue;
        for (ServoOrder o : {ServoOrder::left_right, ServoOrder::right_left}) {
          MappingCommand c = base;
          c.mode = RotationMode::servo;
          c.servo_a = a;
          c.servo_b = b;
          c.order = o;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

MappingCommand random_command(std::mt19937_64& rng) {
  static const std::vector<MappingCommand> corpus = all_commands();
  return corpus[std::uniform_int_distribution<std::size_t>(0, corpus.size() - 1)(rng)];
}

// Renders a command with its channel pairs in a shuffled order.
std::string shuffled_text(const MappingCommand& c, std::mt19937_64& rng) {
  const std::string canon = render_command(c);
  std::vector<std::string> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back(canon.substr(2 * i, 2));
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::string out;
  for (const auto& p : pairs) out += p;
  return out + canon.substr(8);
}

// Independent oracle: drive the simulated plant from rest with a full-slider
// stick input and read the motion it produces.
struct Motion {
  Vec3 velocity;
  double yaw_rate;
};

Motion simulate(const Plant& plant, const MappingCommand& cmd, const JoystickInput& in) {
  const ChannelMapping m = ChannelMapping::from_command(cmd);
  const Actuation a = route(plant.design(), mix(m, in));
  SimConfig cfg;
  SimState s;
  for (int i = 0; i < 2; ++i) s = plant.step(s, a, cfg);
  return {s.velocity, s.yaw_rate};
}

Verdicts oracle(const Plant& plant, const MappingCommand& cmd) {
  constexpr double kSmall = 1e-9;
  Verdicts v;
  const Motion fwd = simulate(plant, cmd, {0, 1, 0, 1});
  v.horizontal = fwd.velocity.x() > kSmall && std::abs(fwd.velocity.z()) < kSmall;
  const Motion climb = simulate(plant, cmd, {0, 0, 1, 1});
  v.vertical = climb.velocity.z() < -kSmall && std::abs(climb.velocity.x()) < kSmall;
  if (cmd.mode != RotationMode::unconfirmed) {
    const Motion turn = simulate(plant, cmd, {1, cmd.mode == RotationMode::servo ? 1.0 : 0.0, 0, 1});
    v.rotation = turn.yaw_rate > kSmall;
  }
  return v;
}

} // namespace

TEST(Parse, PublishedCommands) {
  auto c = parse_command("1F2B3U4DN");
  EXPECT_EQ(c.role(1), Role::forward);
  EXPECT_EQ(c.role(2), Role::backward);
  EXPECT_EQ(c.role(3), Role::up);
  EXPECT_EQ(c.role(4), Role::down);
  EXPECT_EQ(c.mode, RotationMode::unconfirmed);

  c = parse_command("1F2F3U4DC1L2R");
  EXPECT_EQ(c.mode, RotationMode::dc);
  EXPECT_EQ(c.left, 1);
  EXPECT_EQ(c.right, 2);

  c = parse_command("1F2F3U4DC2L1R");
  EXPECT_EQ(c.left, 2);
  EXPECT_EQ(c.right, 1);

  c = parse_command("1U2F3N4NS21MLR");
  EXPECT_EQ(c.mode, RotationMode::servo);
  EXPECT_EQ(c.servo_a, 2);
  EXPECT_EQ(c.servo_b, 1);
  EXPECT_EQ(c.order, ServoOrder::left_right);
  EXPECT_EQ(parse_command("1U2F3N4NS21MRL").order, ServoOrder::right_left);
}

TEST(Parse, PairsInAnyOrderRenderCanonically) {
  EXPECT_EQ(render_command(parse_command("4B3U2U1FC4L1R")), "1F2U3U4BC4L1R");
  EXPECT_EQ(render_command(parse_command("1F2U3U4BC4L1R")), "1F2U3U4BC4L1R");
}

TEST(Parse, PositionedErrors) {
  auto e = parse_failure("1F2B3U");
  EXPECT_EQ(e.kind(), CommandError::Kind::lexical);
  EXPECT_EQ(e.position(), 7);

  e = parse_failure("1F1B3U4DN");
  EXPECT_EQ(e.kind(), CommandError::Kind::duplicate_channel);
  EXPECT_EQ(e.position(), 3);

  e = parse_failure("1F2X3U4DN");
  EXPECT_EQ(e.kind(), CommandError::Kind::unknown_role);
  EXPECT_EQ(e.position(), 4);

  e = parse_failure("1F2B3U4DNN");
  EXPECT_EQ(e.kind(), CommandError::Kind::dangling_tail);
  EXPECT_EQ(e.position(), 10);

  e = parse_failure("5F2B3U4DN");
  EXPECT_EQ(e.kind(), CommandError::Kind::lexical);
  EXPECT_EQ(e.position(), 1);

  e = parse_failure("1f2B3U4DN");
  EXPECT_EQ(e.position(), 2);

  e = parse_failure("1F2B3U4DC1L1R");
  EXPECT_EQ(e.kind(), CommandError::Kind::invalid_reference);

  e = parse_failure("1F2B3N4DC3L1R");
  EXPECT_EQ(e.kind(), CommandError::Kind::invalid_reference);
  EXPECT_EQ(e.position(), 10);

  e = parse_failure("1U2F3N4NS22MLR");
  EXPECT_EQ(e.kind(), CommandError::Kind::invalid_reference);

  e = parse_failure("1U2F3N4NS21LR");
  EXPECT_EQ(e.position(), 12);

  e = parse_failure("1U2F3N4NS21MLL");
  EXPECT_EQ(e.position(), 14);

  e = parse_failure("");
  EXPECT_EQ(e.position(), 1);
}

TEST(Parse, RoundTripRandomCommands) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const MappingCommand c = random_command(rng);
    EXPECT_EQ(parse_command(render_command(c)), c);
    const std::string shuffled = shuffled_text(c, rng);
    const MappingCommand again = parse_command(shuffled);
    EXPECT_EQ(again, c) << shuffled;
    EXPECT_EQ(render_command(parse_command(render_command(again))), render_command(again));
  }
}

TEST(Parse, EveryValidCommandRoundTrips) {
  const auto corpus = all_commands();
  // 625 role sets; 4800 dc pairs over active channels; 112 servo tails per role set.
  EXPECT_EQ(corpus.size(), 625u + 4800u + 625u * 112u);
  std::set<std::string> texts;
  for (const auto& c : corpus) {
    const std::string text = render_command(c);
    EXPECT_TRUE(texts.insert(text).second) << text;
    EXPECT_EQ(parse_command(text), c);
  }
}

TEST(Parse, FuzzNeverAborts) {
  std::mt19937_64 rng(99);
  const std::string alphabet = "12345678909FBUDNCSLRMXfb \t\x01\xff";
  std::uniform_int_distribution<int> len(0, 20), pick(0, static_cast<int>(alphabet.size()) - 1), op(0, 3);
  int parsed = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string s;
    if (i % 2 == 0) {
      const int n = len(rng);
      for (int k = 0; k < n; ++k) s.push_back(alphabet[pick(rng)]);
    } else {
      // Mutate a valid command.
      s = shuffled_text(random_command(rng), rng);
      const int edits = 1 + op(rng);
      for (int k = 0; k < edits && !s.empty(); ++k) {
        const std::size_t at = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
        switch (op(rng)) {
          case 0: s[at] = alphabet[pick(rng)]; break;
          case 1: s.erase(at, 1); break;
          case 2: s.insert(at, 1, alphabet[pick(rng)]); break;
          default: break; // leave it valid
        }
      }
    }
    try {
      const MappingCommand c = parse_command(s);
      ++parsed;
      EXPECT_EQ(parse_command(render_command(c)), c);
    } catch (const CommandError& e) {
      EXPECT_GE(e.position(), 1) << s;
      EXPECT_LE(e.position(), static_cast<int>(s.size()) + 1) << s;
    }
  }
  EXPECT_GT(parsed, 1000);
}

TEST(Mixer, ForwardStickCase1) {
  const auto m = ChannelMapping::from_command(parse_command("1F2U3U4BC4L1R"));
  const MixerOutput out = mix(m, {0, 1, 0, 1});
  EXPECT_EQ(out.duties[0], 1.0);
  EXPECT_EQ(out.duties[3], -1.0); // backward-role channel runs reversed
  EXPECT_EQ(out.duties[1], 0.0);
  EXPECT_EQ(out.duties[2], 0.0);
}

TEST(Mixer, DcYawPair) {
  const auto m = ChannelMapping::from_command(parse_command("1F2U3U4FC4L1R"));
  const MixerOutput out = mix(m, {1, 0, 0, 1});
  EXPECT_EQ(out.duties[3], 1.0);
  EXPECT_EQ(out.duties[0], -1.0);
  EXPECT_EQ(out.duties[1], 0.0);
}

TEST(Mixer, ServoYaw) {
  const auto m = ChannelMapping::from_command(parse_command("1U2F3N4NS21MLR"));
  EXPECT_TRUE(m.servo_mode);
  const MixerOutput out = mix(m, {0.5, 0.2, 0, 0.5});
  EXPECT_EQ(out.servos[1], 0.5);  // servo 2 steers left
  EXPECT_EQ(out.servos[0], -0.5); // servo 1 steers right
  EXPECT_EQ(out.duties[1], 0.1);
}

TEST(Mixer, SliderGatesPower) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const auto m = ChannelMapping::from_command(random_command(rng));
    const MixerOutput out = mix(m, {u(rng), u(rng), u(rng), 0.0});
    for (double d : out.duties) EXPECT_EQ(d, 0.0);
  }
}

TEST(Mixer, OutputsBounded) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1), s(0, 1);
  for (int i = 0; i < 5000; ++i) {
    const auto m = ChannelMapping::from_command(random_command(rng));
    const MixerOutput out = mix(m, {u(rng), u(rng), u(rng), s(rng)});
    for (double d : out.duties) {
      EXPECT_GE(d, -1.0);
      EXPECT_LE(d, 1.0);
    }
    for (double d : out.servos) {
      EXPECT_GE(d, -1.0);
      EXPECT_LE(d, 1.0);
    }
  }
}

TEST(Mixer, RejectsOutOfRangeInput) {
  const auto m = ChannelMapping::from_command(parse_command("1F2B3U4DN"));
  EXPECT_THROW(mix(m, {0, 1.1, 0, 1}), std::out_of_range);
  EXPECT_THROW(mix(m, {0, 0, 0, -0.1}), std::out_of_range);
}

TEST(Route, ChannelsAndServoPorts) {
  const DesignSpec d = load_fixture("case2.toml");
  MixerOutput out;
  out.duties = {0.1, 0.2, 0.3, 0.4};
  out.servos[0] = -0.7;
  const Actuation a = route(d, out);
  ASSERT_EQ(a.duties.size(), 2u);
  EXPECT_EQ(a.duties[0], 0.1);
  EXPECT_EQ(a.duties[1], 0.2);
  ASSERT_EQ(a.deflections.size(), 2u);
  EXPECT_EQ(a.deflections[0], 0.0);
  EXPECT_EQ(a.deflections[1], -0.7);
}

TEST(Remap, Case1Sequence) {
  RemapSession s(load_fixture("case1.toml"));
  auto r = s.step(parse_command("1F2B3U4DN"));
  EXPECT_EQ(r.iteration, RemapIteration::horizontal_vertical);
  r = s.step(parse_command("1F2U3U4BC1L4R"));
  EXPECT_EQ(r.verdicts, (Verdicts{true, true, false}));
  EXPECT_EQ(r.iteration, RemapIteration::rotation);
  r = s.step(parse_command("1F2U3U4BC4L1R"));
  EXPECT_EQ(r.verdicts, (Verdicts{true, true, true}));
  EXPECT_EQ(r.iteration, RemapIteration::done);
  EXPECT_THROW(s.step(parse_command("1F2U3U4BC4L1R")), RemapError);
}

TEST(Remap, Case2Sequence) {
  RemapSession s(load_fixture("case2.toml"));
  s.step(parse_command("1F2B3U4DN"));
  auto r = s.step(parse_command("1U2F3N4NS21MLR"));
  EXPECT_EQ(r.verdicts, (Verdicts{true, true, false}));
  EXPECT_EQ(r.iteration, RemapIteration::rotation);
  r = s.step(parse_command("1U2F3N4NS21MRL"));
  EXPECT_EQ(r.verdicts, (Verdicts{true, true, true}));
  EXPECT_EQ(r.iteration, RemapIteration::done);
}

TEST(Remap, PairedForwardSequence) {
  RemapSession s(load_fixture("paired_forward.toml"));
  auto r = s.step(parse_command("1F2B3U4DN"));
  EXPECT_FALSE(r.verdicts.horizontal);
  r = s.step(parse_command("1F2F3U4DC1L2R"));
  EXPECT_EQ(r.verdicts, (Verdicts{true, true, false}));
  r = s.step(parse_command("1F2F3U4DC2L1R"));
  EXPECT_EQ(r.iteration, RemapIteration::done);
}

TEST(Remap, IdentityPlantPassesImmediately) {
  RemapSession s(load_fixture("identity.toml"));
  const auto r = s.step(parse_command("1F2B3U4DN"));
  EXPECT_TRUE(r.verdicts.horizontal && r.verdicts.vertical);
  EXPECT_FALSE(r.verdicts.rotation);
  EXPECT_EQ(r.iteration, RemapIteration::rotation);
}

TEST(Remap, FailingCheckHoldsIteration) {
  RemapSession s(load_fixture("case1.toml"));
  s.step(parse_command("1F2B3U4DN"));
  const auto r = s.step(parse_command("1F2B3U4DN"));
  EXPECT_FALSE(r.advanced);
  EXPECT_EQ(r.iteration, RemapIteration::horizontal_vertical);
}

TEST(Remap, RejectsChannelsWithoutThrusters) {
  RemapSession s(load_fixture("case2.toml"));
  s.step(parse_command("1F2B3U4DN")); // initial command is always accepted
  EXPECT_THROW(s.step(parse_command("1U2F3U4NS21MRL")), RemapError);
  EXPECT_EQ(s.iteration(), RemapIteration::horizontal_vertical);
}

TEST(Remap, ScrambledPlantMatchesExhaustiveSimulation) {
  const DesignSpec scrambled = load_fixture("scrambled_case1.toml");
  const Plant plant(scrambled);
  std::set<std::string> by_oracle, by_probe;
  for (const auto& c : all_commands()) {
    const Verdicts o = oracle(plant, c);
    const Verdicts p = probe(plant, c);
    ASSERT_EQ(o, p) << render_command(c);
    if (o.horizontal && o.vertical && o.rotation) by_oracle.insert(render_command(c));
    if (p.horizontal && p.vertical && p.rotation) by_probe.insert(render_command(c));
  }
  ASSERT_FALSE(by_oracle.empty());
  EXPECT_EQ(by_oracle, by_probe);
  EXPECT_TRUE(by_oracle.count("1U2F3B4UC3L2R"));

  // A session reaches done from a single step exactly on that set.
  std::mt19937_64 rng(1);
  const auto corpus = all_commands();
  int checked = 0;
  for (const auto& c : corpus) {
    const bool accepted = by_oracle.count(render_command(c)) > 0;
    if (!accepted && std::uniform_int_distribution<int>(0, 49)(rng) != 0) continue; // sample rejects
    RemapSession s(scrambled);
    s.step(parse_command("1F2B3U4DN"));
    RemapIteration it;
    try {
      it = s.step(c).iteration;
    } catch (const RemapError&) {
      it = RemapIteration::horizontal_vertical; // unwired channel
    }
    EXPECT_EQ(it == RemapIteration::done, accepted) << render_command(c);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(Remap, DoneImpliesCorrectMotionInSimulation) {
  for (const char* name : {"case1.toml", "case2.toml", "paired_forward.toml", "scrambled_case1.toml"}) {
    const Plant plant(load_fixture(name));
    for (const auto& c : all_commands()) {
      const Verdicts p = probe(plant, c);
      if (!(p.horizontal && p.vertical && p.rotation)) continue;
      SimConfig cfg;
      const auto m = ChannelMapping::from_command(c);
      const auto run_for = [&](JoystickInput in) {
        SimState s;
        const Actuation a = route(plant.design(), mix(m, in));
        for (int i = 0; i < 50; ++i) s = plant.step(s, a, cfg);
        return s;
      };
      EXPECT_GT(run_for({0, 1, 0, 1}).position.x(), 0.0) << name << " " << render_command(c);
      EXPECT_LT(run_for({0, 0, 1, 1}).position.z(), 0.0) << name << " " << render_command(c);
      EXPECT_GT(run_for({1, c.mode == RotationMode::servo ? 1.0 : 0.0, 0, 1}).yaw, 0.0) << name;
    }
  }
}
