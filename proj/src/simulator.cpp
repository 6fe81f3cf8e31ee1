#include "ircr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

namespace ircr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t batch) {
  return splitmix64(splitmix64(seed) ^ splitmix64(batch + 0x632be59bd9b4e019ULL));
}

// Per-batch sums. For squared errors: s1 = sum e^2, s2 = sum e^4. For
// Hamming errors s2 is unused. `agree` counts samples with equal estimates.
struct BatchSums {
  double a1 = 0.0, a2 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double agree = 0.0;

  BatchSums operator+(const BatchSums& o) const {
    return {a1 + o.a1, a2 + o.a2, b1 + o.b1, b2 + o.b2, agree + o.agree};
  }
};

BatchSums pairwise_sum(const std::vector<BatchSums>& v, std::size_t lo,
                       std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

// Runs kernel(rng, count) -> BatchSums over all batches and reduces them.
template <typename Kernel>
BatchSums run_batches(const SimConfig& cfg, Kernel&& kernel) {
  const std::uint64_t batches = (cfg.n + kSimBatch - 1) / kSimBatch;
  std::vector<BatchSums> sums(batches);
  unsigned threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                         std::min<std::uint64_t>(batches, 1024))));
  auto work = [&](unsigned w) {
    for (std::uint64_t b = w; b < batches; b += threads) {
      const std::uint64_t count = std::min(kSimBatch, cfg.n - b * kSimBatch);
      std::mt19937_64 rng(batch_seed(cfg.seed, b));
      sums[b] = kernel(rng, count);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  return pairwise_sum(sums, 0, sums.size());
}

double mse_standard_error(double s1, double s2, double n) {
  const double m = s1 / n;
  return std::sqrt(std::max(s2 / n - m * m, 0.0) / n);
}

double bernoulli_standard_error(double p, double n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
}

}  // namespace

std::string schedule_name(Schedule s) {
  switch (s) {
    case Schedule::kSequentialA: return "sequential-a";
    case Schedule::kSequentialB: return "sequential-b";
    case Schedule::kSimultaneous: return "simultaneous";
  }
  return "sequential-a";
}

Schedule parse_schedule(const std::string& name) {
  if (name == "sequential-a") return Schedule::kSequentialA;
  if (name == "sequential-b") return Schedule::kSequentialB;
  if (name == "simultaneous") return Schedule::kSimultaneous;
  throw InputError("schedule must be sequential-a, sequential-b or simultaneous");
}

void SimConfig::validate() const {
  if (n < 1) throw InputError("n must be >= 1");
}

SimResult simulate_linear(const GaussianPair& src, const TestChannels& tc,
                          const LinearFn& fa, const LinearFn& fb,
                          const SimConfig& cfg) {
  src.validate();
  tc.validate();
  fa.validate();
  fb.validate();
  cfg.validate();
  const double sx = std::sqrt(src.sigma_x2), sv = std::sqrt(src.sigma_v2);
  const double s1 = std::sqrt(tc.n1), s2 = std::sqrt(tc.n2);

  const BatchSums tot = run_batches(cfg, [&](std::mt19937_64& rng,
                                             std::uint64_t count) {
    std::normal_distribution<double> normal;
    BatchSums s;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double x = sx * normal(rng);
      const double y = x + sv * normal(rng);
      const double u1 = tc.a1 * x + s1 * normal(rng);
      const double u2 = tc.a2 * y + s2 * normal(rng);
      const double ea = (fa.alpha * x + fa.beta * y) - (fa.alpha * u1 + fa.beta * u2);
      const double eb = (fb.alpha * x + fb.beta * y) - (fb.alpha * u1 + fb.beta * u2);
      s.a1 += ea * ea;
      s.a2 += ea * ea * ea * ea;
      s.b1 += eb * eb;
      s.b2 += eb * eb * eb * eb;
    }
    s.agree = static_cast<double>(count);
    return s;
  });

  const double n = static_cast<double>(cfg.n);
  SimResult r;
  r.config = cfg;
  r.d_a = tot.a1 / n;
  r.d_b = tot.b1 / n;
  r.se_a = mse_standard_error(tot.a1, tot.a2, n);
  r.se_b = mse_standard_error(tot.b1, tot.b2, n);
  r.agreement = tot.agree / n;
  return r;
}

double quantize(double v, double range, int bits) {
  const double cells = std::ldexp(1.0, bits);
  const double width = 2.0 * range / cells;
  double idx = std::floor((v + range) / width);
  idx = std::clamp(idx, 0.0, cells - 1.0);
  return -range + (idx + 0.5) * width;
}

SimResult simulate_indicator_schedule(const GaussianPair& src, int rx_bits,
                                      const SimConfig& cfg) {
  src.validate();
  cfg.validate();
  if (rx_bits < 1 || rx_bits > 52) throw InputError("rx_bits must be in [1, 52]");
  const double sx = std::sqrt(src.sigma_x2), sv = std::sqrt(src.sigma_v2);
  const double sy = std::sqrt(src.sigma_y2());
  const double y_half = sy * std::sqrt(2.0 / std::numbers::pi);
  const Schedule sched = cfg.schedule;

  const BatchSums tot = run_batches(cfg, [&](std::mt19937_64& rng,
                                             std::uint64_t count) {
    std::normal_distribution<double> normal;
    BatchSums s;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double x = sx * normal(rng);
      const double y = x + sv * normal(rng);
      const bool truth = x >= y;
      bool out_a = false, out_b = false;
      switch (sched) {
        case Schedule::kSequentialA: {
          const bool b = quantize(x, 6.0 * sx, rx_bits) >= y;
          out_a = out_b = b;
          break;
        }
        case Schedule::kSequentialB: {
          const bool b = x >= quantize(y, 6.0 * sy, rx_bits);
          out_a = out_b = b;
          break;
        }
        case Schedule::kSimultaneous: {
          const bool c = 0.0 >= y;
          const double y_hat = c ? -y_half : y_half;
          const bool b = quantize(x, 6.0 * sx, rx_bits) >= y_hat;
          out_a = out_b = b;
          break;
        }
      }
      s.a1 += out_a != truth ? 1.0 : 0.0;
      s.b1 += out_b != truth ? 1.0 : 0.0;
      s.agree += out_a == out_b ? 1.0 : 0.0;
    }
    return s;
  });

  const double n = static_cast<double>(cfg.n);
  SimResult r;
  r.config = cfg;
  r.d_a = tot.a1 / n;
  r.d_b = tot.b1 / n;
  r.se_a = bernoulli_standard_error(r.d_a, n);
  r.se_b = bernoulli_standard_error(r.d_b, n);
  r.agreement = tot.agree / n;
  return r;
}

IndicatorPair simulate_indicator(const GaussianPair& src, int rx_bits,
                                 const SimConfig& cfg) {
  SimConfig seq = cfg, sim = cfg;
  seq.schedule = Schedule::kSequentialA;
  sim.schedule = Schedule::kSimultaneous;
  return {simulate_indicator_schedule(src, rx_bits, seq),
          simulate_indicator_schedule(src, rx_bits, sim)};
}

}  // namespace ircr
