#pragma once

// Monte Carlo checks of the two-round linear scheme and of the
// sequential-versus-simultaneous indicator experiment.
//
// Samples are drawn in fixed batches of kSimBatch. Batch b uses an mt19937_64
// seeded with splitmix64(seed, b), so results do not depend on the number of
// worker threads. Per-batch sums are combined by pairwise summation in batch
// order.

#include <cstdint>
#include <string>

#include "ircr/gaussian_core.hpp"

namespace ircr {

inline constexpr std::uint64_t kSimBatch = 65536;

enum class Schedule { kSequentialA, kSequentialB, kSimultaneous };

std::string schedule_name(Schedule s);
// Throws InputError on an unknown name.
Schedule parse_schedule(const std::string& name);

struct SimConfig {
  std::uint64_t n = 1'000'000;
  std::uint64_t seed = 1;
  Schedule schedule = Schedule::kSequentialA;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SimResult {
  double d_a = 0.0;        // empirical distortion at A
  double d_b = 0.0;        // empirical distortion at B
  double se_a = 0.0;       // standard error of d_a
  double se_b = 0.0;
  double agreement = 1.0;  // fraction of samples where both sides' estimates agree
  SimConfig config;
};

// Mean-squared errors of Zhat_k = alpha_k U1 + beta_k U2 against
// Z_k = alpha_k X + beta_k Y. Both terminals use the same decoder, so the
// agreement rate is 1.
SimResult simulate_linear(const GaussianPair& src, const TestChannels& tc,
                          const LinearFn& fa, const LinearFn& fb,
                          const SimConfig& cfg);

// Hamming distortion against 1{X >= Y}.
//   sequential-A: A sends X quantized to rx_bits bits over +-6 sigma_X; B
//     computes b = 1{Xq >= Y} and returns it; both output b.
//   sequential-B: roles swapped (Y quantized over +-6 sigma_Y).
//   simultaneous: A sends Xq while B sends c = 1{0 >= Y}; both output
//     1{Xq >= y(c)} with y(c) = E[Y | c] = -+ sigma_Y sqrt(2/pi).
SimResult simulate_indicator_schedule(const GaussianPair& src, int rx_bits,
                                      const SimConfig& cfg);

struct IndicatorPair {
  SimResult sequential;    // sequential-A
  SimResult simultaneous;
};

// Both schedules with the same seed and sample count.
IndicatorPair simulate_indicator(const GaussianPair& src, int rx_bits,
                                 const SimConfig& cfg);

// Uniform mid-point quantizer over [-range, range] with 2^bits cells;
// saturates outside the range.
double quantize(double v, double range, int bits);

}  // namespace ircr
