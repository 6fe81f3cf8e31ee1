#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ircr/simulator.hpp"

using namespace ircr;

namespace {

const GaussianPair kSrc{4, 4};

}  // namespace

TEST(SimulateLinear, MatchesAnalyticWithinFourStandardErrors) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(0.3, 6), gain(-1.5, 1.5);
  for (int i = 0; i < 5; ++i) {
    const GaussianPair s{pos(rng), pos(rng)};
    const TestChannels tc{gain(rng), pos(rng), gain(rng), pos(rng)};
    const LinearFn fa{gain(rng), gain(rng)}, fb{gain(rng), gain(rng)};
    SimConfig cfg;
    cfg.n = 200'000;
    cfg.seed = 100 + i;
    const SimResult r = simulate_linear(s, tc, fa, fb, cfg);
    const AchievedPoint ap = achieved_point(s, tc, fa, fb);
    EXPECT_LE(std::abs(r.d_a - ap.d_a), 4 * r.se_a) << i;
    EXPECT_LE(std::abs(r.d_b - ap.d_b), 4 * r.se_b) << i;
    EXPECT_EQ(r.agreement, 1.0);
  }
}

TEST(SimulateLinear, NoiselessChannelGivesExactZero) {
  SimConfig cfg;
  cfg.n = 10'000;
  const SimResult r = simulate_linear(kSrc, {1, 0, 1, 0}, {0.5, 0.5}, {1, 0}, cfg);
  EXPECT_EQ(r.d_b, 0.0);
  EXPECT_EQ(r.se_b, 0.0);
}

TEST(SimulateLinear, ReproducibleAndThreadIndependent) {
  SimConfig cfg;
  cfg.n = 300'001;
  cfg.seed = 77;
  cfg.threads = 1;
  const TestChannels tc{0.7, 1.0, 0.4, 2.0};
  const SimResult a = simulate_linear(kSrc, tc, {1, 0}, {0, 1}, cfg);
  const SimResult b = simulate_linear(kSrc, tc, {1, 0}, {0, 1}, cfg);
  cfg.threads = 3;
  const SimResult c = simulate_linear(kSrc, tc, {1, 0}, {0, 1}, cfg);
  EXPECT_EQ(a.d_a, b.d_a);
  EXPECT_EQ(a.se_b, b.se_b);
  EXPECT_EQ(a.d_a, c.d_a);
  EXPECT_EQ(a.d_b, c.d_b);
  cfg.seed = 78;
  EXPECT_NE(simulate_linear(kSrc, tc, {1, 0}, {0, 1}, cfg).d_a, a.d_a);
}

// Standard error scales as 1/sqrt(n): quadrupling n halves it.
TEST(SimulateLinear, StandardErrorScaling) {
  const TestChannels tc{0.9, 1.0, 0.5, 1.0};
  SimConfig cfg;
  cfg.seed = 4;
  cfg.n = 250'000;
  const SimResult small = simulate_linear(kSrc, tc, {1, 1}, {1, 0}, cfg);
  cfg.n = 1'000'000;
  const SimResult large = simulate_linear(kSrc, tc, {1, 1}, {1, 0}, cfg);
  EXPECT_NEAR(small.se_a / large.se_a, 2.0, 0.4);
  cfg.n = 500'000;
  const SimResult mid = simulate_linear(kSrc, tc, {1, 1}, {1, 0}, cfg);
  EXPECT_NEAR(small.se_a / mid.se_a, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(Quantizer, MidpointsAndSaturation) {
  EXPECT_EQ(quantize(0.1, 1.0, 1), 0.5);
  EXPECT_EQ(quantize(-0.1, 1.0, 1), -0.5);
  EXPECT_EQ(quantize(5.0, 1.0, 2), 0.75);
  EXPECT_EQ(quantize(-5.0, 1.0, 2), -0.75);
  EXPECT_NEAR(quantize(0.3, 1.0, 20), 0.3, 2.0 / (1 << 20));
}

TEST(SimulateIndicator, SequentialBeatsSimultaneous) {
  SimConfig cfg;
  cfg.n = 200'000;
  cfg.seed = 9;
  for (int bits : {1, 4, 8, 12}) {
    const IndicatorPair r = simulate_indicator(kSrc, bits, cfg);
    EXPECT_LE(r.sequential.d_a, r.simultaneous.d_a) << bits;
    EXPECT_EQ(r.sequential.d_a, r.sequential.d_b);
    EXPECT_EQ(r.sequential.agreement, 1.0);
    EXPECT_EQ(r.simultaneous.agreement, 1.0);
    EXPECT_GT(r.simultaneous.d_a, 0.01);
  }
}

TEST(SimulateIndicator, SequentialBMirrorsA) {
  SimConfig cfg;
  cfg.n = 200'000;
  cfg.seed = 2;
  cfg.schedule = Schedule::kSequentialB;
  const SimResult r = simulate_indicator_schedule(kSrc, 14, cfg);
  EXPECT_LT(r.d_a, 2e-3);
  EXPECT_EQ(r.config.schedule, Schedule::kSequentialB);
}

// With V nearly zero, X >= Y is a coin flip neither schedule can resolve.
TEST(SimulateIndicator, DegenerateTiesNearHalf) {
  SimConfig cfg;
  cfg.n = 100'000;
  const IndicatorPair r = simulate_indicator({4, 1e-12}, 8, cfg);
  EXPECT_NEAR(r.sequential.d_a, 0.5, 0.02);
  EXPECT_NEAR(r.simultaneous.d_a, 0.5, 0.02);
}

TEST(Schedules, NamesRoundTrip) {
  for (Schedule s : {Schedule::kSequentialA, Schedule::kSequentialB, Schedule::kSimultaneous}) {
    EXPECT_EQ(parse_schedule(schedule_name(s)), s);
  }
  EXPECT_THROW(parse_schedule("both"), InputError);
  SimConfig bad;
  bad.n = 0;
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_THROW(simulate_indicator(kSrc, 0, {}), InputError);
}
