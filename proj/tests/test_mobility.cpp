#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gradeloc/mobility.hpp"

using namespace gradeloc;

namespace {

MobilityConfig field300(std::size_t n = 10) { return {0.7, 0.8, n, {{0, 0}, {300, 300}}}; }

TEST(AdvanceWalk, TenRightStepsFromOrigin) {
  auto cfg = field300(10);
  Rng rng(42, "walk");
  auto s = walk_start(cfg);
  s.current_dir = Heading::Right;
  s.steps_in_segment = 1;  // mid-segment: keep the direction for the remaining steps
  double sum = 0;
  for (int i = 0; i < 9; ++i) {
    const auto st = advance_walk(s, cfg, rng);
    EXPECT_EQ(st.event.actual_dir, Heading::Right);
    EXPECT_GE(st.event.actual_stride, 0.7);
    EXPECT_LE(st.event.actual_stride, 0.8);
    sum += st.event.actual_stride;
    s = st.state;
  }
  EXPECT_DOUBLE_EQ(s.actual_pos.y, 0.0);
  EXPECT_NEAR(s.actual_pos.x, sum, 1e-12);
  EXPECT_NEAR(s.actual_pos.x, 9 * 0.75, 9 * 0.05);
}

TEST(AdvanceWalk, UnitStridesGiveManhattanPath) {
  MobilityConfig cfg{1.0, 1.0, 1, {{0, 0}, {10, 10}}};
  Rng rng(8);
  auto s = walk_start(cfg);
  int steps = 0;
  while (!s.episode_done) {
    const auto st = advance_walk(s, cfg, rng);
    EXPECT_DOUBLE_EQ(st.event.actual_stride, 1.0);
    s = st.state;
    ++steps;
    EXPECT_DOUBLE_EQ(s.actual_pos.x, std::round(s.actual_pos.x));
    EXPECT_DOUBLE_EQ(s.actual_pos.y, std::round(s.actual_pos.y));
  }
  EXPECT_EQ(steps, 18);  // (9, 9): one unit from each far edge
  EXPECT_EQ(s.actual_pos, (Point2D{9, 9}));
}

TEST(AdvanceWalk, ForcedDownAtRightEdge) {
  auto cfg = field300(1);  // direction drawn every step
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    WalkState s;
    s.actual_pos = {300 - 0.8, 100};
    s.steps_in_segment = 0;
    const auto st = advance_walk(s, cfg, rng);
    EXPECT_EQ(st.event.actual_dir, Heading::Down);
    EXPECT_DOUBLE_EQ(st.state.actual_pos.x, 300 - 0.8);
  }
}

TEST(AdvanceWalk, ForcedRightAtBottomEdge) {
  auto cfg = field300(1);
  Rng rng(1);
  WalkState s;
  s.actual_pos = {10, 299.5};
  for (int i = 0; i < 20; ++i) {
    auto st = advance_walk(s, cfg, rng);
    EXPECT_EQ(st.event.actual_dir, Heading::Right);
    s = st.state;
  }
}

TEST(AdvanceWalk, CalledAfterDoneIsContractViolation) {
  auto cfg = field300();
  Rng rng(1);
  WalkState s;
  s.actual_pos = {299.5, 299.5};
  s.episode_done = true;
  EXPECT_THROW(advance_walk(s, cfg, rng), ContractViolation);
}

TEST(AdvanceWalk, DirectionOnlyChangesAtSegmentBoundaryUnlessForced) {
  auto cfg = field300(10);
  Rng rng(5);
  auto s = walk_start(cfg);
  std::size_t step = 0;
  Heading prev = Heading::Right;
  while (!s.episode_done) {
    const auto st = advance_walk(s, cfg, rng);
    const bool boundary = step % 10 == 0;
    const bool forced = detail::blocked(s, cfg, prev);
    if (step > 0 && !boundary && !forced) {
      EXPECT_EQ(st.event.actual_dir, prev) << "step " << step;
    }
    prev = st.event.actual_dir;
    s = st.state;
    ++step;
  }
}

// Properties over whole episodes: monotone, in-field, path length bounds, ends near the corner.
TEST(WalkProperty, EpisodeInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (std::size_t n : {1u, 10u, 60u}) {
      auto cfg = field300(n);
      Rng rng(seed, "walk");
      auto s = walk_start(cfg);
      std::size_t steps = 0;
      double path = 0;
      while (!s.episode_done) {
        const auto st = advance_walk(s, cfg, rng);
        EXPECT_GE(st.state.actual_pos.x, s.actual_pos.x);
        EXPECT_GE(st.state.actual_pos.y, s.actual_pos.y);
        EXPECT_TRUE(cfg.field.contains(st.state.actual_pos));
        path += norm(st.state.actual_pos - s.actual_pos);
        s = st.state;
        ++steps;
      }
      EXPECT_GE(path, steps * 0.7 - 1e-9);
      EXPECT_LE(path, steps * 0.8 + 1e-9);
      EXPECT_GT(s.actual_pos.x, 300 - 0.8 - 1e-9);
      EXPECT_GT(s.actual_pos.y, 300 - 0.8 - 1e-9);
      EXPECT_NEAR(path, s.actual_pos.x + s.actual_pos.y, 1e-6);
    }
}

TEST(MobilityConfigValidate, Errors) {
  EXPECT_THROW((MobilityConfig{0.0, 0.8, 10, {{0, 0}, {1, 1}}}.validate()), ConfigError);
  EXPECT_THROW((MobilityConfig{0.9, 0.8, 10, {{0, 0}, {1, 1}}}.validate()), ConfigError);
  EXPECT_THROW((MobilityConfig{0.7, 0.8, 0, {{0, 0}, {1, 1}}}.validate()), ConfigError);
  EXPECT_THROW((SensorErrorModel{0.0, 1, 0}.validate()), ConfigError);
  EXPECT_THROW((SensorErrorModel{1.1, 1, 0}.validate()), ConfigError);
  EXPECT_THROW((SensorErrorModel{1, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((SensorErrorModel{1, 1, -1}.validate()), ConfigError);
  EXPECT_NO_THROW((SensorErrorModel{0.95, 0.99, 5}.validate()));
}

TEST(SenseStep, ErrorFreeEqualsActual) {
  Rng rng(1);
  for (auto dir : {Heading::Right, Heading::Down}) {
    const StepEvent ev{0.73, dir};
    const auto s = sense_step(ev, {1, 1, 0}, rng);
    EXPECT_TRUE(s.detected);
    EXPECT_EQ(s.displacement(), ev.displacement());
  }
}

TEST(SenseStep, PaperAccurateSensorVector) {
  Rng rng(1);
  const auto s = sense_step({0.8, Heading::Right}, {0.95, 1.0, 5.0}, rng);
  const auto d = s.displacement();
  EXPECT_NEAR(d.x, 0.7571079705497267, 1e-12);
  EXPECT_NEAR(d.y, 0.06623836448822021, 1e-12);  // +y is Down
  EXPECT_NEAR(s.reported_heading(), 5.0 * std::numbers::pi / 180.0, 1e-15);
}

TEST(SenseStep, DownStepBiasedRight) {
  Rng rng(1);
  const auto s = sense_step({0.8, Heading::Down}, {0.95, 1.0, 5.0}, rng);
  const auto d = s.displacement();
  EXPECT_NEAR(d.x, 0.06623836448822021, 1e-12);
  EXPECT_NEAR(d.y, 0.7571079705497267, 1e-12);
  EXPECT_NEAR(std::cos(s.reported_heading()) * 0.76, d.x, 1e-12);
}

TEST(SenseStep, DetectionFrequency) {
  Rng rng(99, "sense/x");
  int hit = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hit += sense_step({0.75, Heading::Right}, {1.0, 0.9, 0.0}, rng).detected;
  EXPECT_NEAR(static_cast<double>(hit) / n, 0.9, 0.005);
}

TEST(SenseStep, MagnitudeIsExactlySaTimesStride) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double stride = 0.7 + 0.1 * rng.uniform();
    const double sa = 0.5 + 0.5 * rng.uniform();
    const double ga = 20 * rng.uniform();
    const StepEvent ev{stride, rng.coin() ? Heading::Down : Heading::Right};
    const auto s = sense_step(ev, {sa, 1.0, ga}, rng);
    EXPECT_NEAR(norm(s.displacement()), sa * stride, 1e-12);
  }
}

TEST(SenseStep, MissedStepContributesNothing) {
  SensedStep s;
  s.detected = false;
  s.reported_stride = 0.8;
  EXPECT_EQ(s.displacement(), (Point2D{0, 0}));
}

}  // namespace
