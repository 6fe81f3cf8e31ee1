#include "ircr/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "ircr/region_discrete.hpp"
#include "ircr/simulator.hpp"
#include "ircr/steinberg_compare.hpp"

namespace ircr {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

DiscreteProblem bsc_problem(double crossover) {
  DiscreteProblem p;
  p.pxy = {(1 - crossover) / 2, crossover / 2, crossover / 2, (1 - crossover) / 2};
  p.rounds = 1;
  p.f_a = {0, 0, 0, 0};
  p.f_b = {0, 0, 1, 1};  // f_B = x
  p.d_a = p.d_ab = hamming_table(2);
  p.d_b = p.d_ba = hamming_table(2);
  p.targets = {kInf, 0.0, kInf, kInf};
  return p;
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> out;
  auto check = [&](const std::string& name, const std::function<std::string(bool&)>& body) {
    SelftestCheck c;
    c.name = name;
    try {
      c.detail = body(c.passed);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(c);
  };
  const GaussianPair src{4.0, 4.0};
  const LinearFn constant{0.0, 0.0}, fx{1.0, 0.0};

  check("one-way CR rate", [&](bool& ok) {
    const double r1 = r_cr_oneway(src, 1.0), r4 = r_cr_oneway(src, 4.0);
    ok = std::abs(r1 - 0.5 * std::log2(2.5)) < 1e-12 && r4 == 0.0;
    return fmt("R_CR(1) = %.6f, R_CR(4) = %.6f", r1, r4);
  });

  check("sum-rate bounds at kappa = 0", [&](bool& ok) {
    const auto b = thm2_bounds(src, constant, fx, {kInf, 1.0}, {});
    ok = std::abs(b.rates.r_odd - 0.5 * std::log2(2.5)) < 1e-12 && b.rates.r_even == 0.0;
    return fmt("r_odd = %.6f, r_even = %.6f", b.rates.r_odd, b.rates.r_even);
  });

  check("Gaussian CMI log-det vs closed form", [&](bool& ok) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(0.1, 5.0), gain(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const GaussianPair s{pos(rng), pos(rng)};
      const TestChannels tc{gain(rng), pos(rng), gain(rng), pos(rng)};
      const AchievedPoint ap = achieved_point(s, tc, fx, fx);
      const ChannelRates cr = channel_rates_closed_form(s, tc);
      worst = std::max({worst, std::abs(ap.r1 - cr.r1), std::abs(ap.r2 - cr.r2)});
    }
    ok = worst < 1e-9;
    return fmt("max deviation %.3g bits", worst);
  });

  check("min sum rate at the side-information corner", [&](bool& ok) {
    const double r = r_sum_star(src, 1.0);
    ok = std::abs(r - 0.5) < 1e-6;
    return fmt("R*_sum(1) = %.9f (expected 0.5)", r);
  });

  check("ratio within [0, 1] on the default grid", [&](bool& ok) {
    ok = true;
    double worst = 0.0;
    for (const auto& p : ratio_curve(src, default_ratio_grid(src))) {
      if (!p.ratio) continue;
      worst = std::max(worst, *p.ratio);
      ok = ok && *p.ratio >= 0.0 && *p.ratio <= 1.0;
    }
    return fmt("max ratio %.6f", worst);
  });

  check("scale covariance of the bounds", [&](bool& ok) {
    const LinearFn fa{0.7, -0.3}, fb{0.2, 0.9};
    const DistortionPair d{0.4, 0.5};
    const KappaVec k{0.1, -0.2, 0.05, 0.1};
    const double c = 2.0;
    const auto b0 = thm2_bounds(src, fa, fb, d, k);
    const auto b1 = thm2_bounds(src, {c * fa.alpha, c * fa.beta}, {c * fb.alpha, c * fb.beta},
                                {c * c * d.d_a, c * c * d.d_b},
                                {c * k.kx_a, c * k.ky_a, c * k.kx_b, c * k.ky_b});
    const double dev = std::max(std::abs(b0.rates.r_odd - b1.rates.r_odd),
                                std::abs(b0.rates.r_even - b1.rates.r_even));
    ok = dev < 1e-12;
    return fmt("deviation %.3g bits", dev);
  });

  check("linear scheme never beats the bound", [&](bool& ok) {
    const auto r = verify_achievability(src, constant, fx, {kInf, 1.0});
    ok = r.found && r.never_below_bound;
    return fmt("achieved %.6f, bound %.6f", r.achieved_sum_rate, r.bound.objective);
  });

  check("discrete copy-channel rate", [&](bool& ok) {
    const DiscreteProblem p = bsc_problem(0.11);
    AuxSizes s;
    s.u = {2};
    AuxChain c = constant_chain(p, s);
    c.round_channels[0] = {1, 0, 0, 1};
    const JointPmf j = build_joint(p, c);
    const double r = round_rates(j)[0];
    ok = std::abs(r - binary_entropy(0.11)) < 1e-12 && markov_residual(j) < 1e-9;
    return fmt("R1 = %.6f, h2(0.11) = %.6f", r, binary_entropy(0.11));
  });

  check("discrete slack targets need zero rate", [&](bool& ok) {
    DiscreteProblem p = bsc_problem(0.11);
    p.targets = {1.0, 1.0, 1.0, 1.0};
    SearchOptions o;
    o.q = 2;
    o.mode = DecoderMode::kCommon;
    o.sizes = default_sizes(p, o.mode);
    const SearchResult r = min_rates_search(p, o);
    ok = r.objective == 0.0;
    return fmt("min rate %.6f", r.objective);
  });

  check("Monte Carlo matches analytic distortion", [&](bool& ok) {
    const TestChannels tc{0.8, 1.5, 0.6, 2.0};
    const LinearFn fa{1.0, 0.5}, fb{-0.4, 1.0};
    SimConfig cfg;
    cfg.n = 200'000;
    cfg.seed = 5;
    const SimResult sim = simulate_linear(src, tc, fa, fb, cfg);
    const AchievedPoint ap = achieved_point(src, tc, fa, fb);
    const double za = std::abs(sim.d_a - ap.d_a) / sim.se_a;
    const double zb = std::abs(sim.d_b - ap.d_b) / sim.se_b;
    const SimResult again = simulate_linear(src, tc, fa, fb, cfg);
    ok = za < 4.0 && zb < 4.0 && again.d_a == sim.d_a && again.d_b == sim.d_b;
    return fmt("z-scores %.2f, %.2f", za, zb);
  });

  check("sequential indicator beats simultaneous", [&](bool& ok) {
    SimConfig cfg;
    cfg.n = 100'000;
    cfg.seed = 3;
    const IndicatorPair r = simulate_indicator(src, 8, cfg);
    ok = r.sequential.d_a <= r.simultaneous.d_a;
    return fmt("sequential %.5f, simultaneous %.5f", r.sequential.d_a, r.simultaneous.d_a);
  });

  return out;
}

}  // namespace ircr
