// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 runs all criteria
//   acceptance --criterion N   runs criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ircr/region_discrete.hpp"
#include "ircr/region_gaussian.hpp"
#include "ircr/simulator.hpp"
#include "ircr/steinberg_compare.hpp"

using namespace ircr;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const GaussianPair kSrc{4, 4};

// Independent evaluation of the sum-rate bound for f_A constant, f_B = X,
// written from the bound's log terms.
double oracle_sum_rate(const GaussianPair& s, double d, double kx, double ky) {
  const double sx = s.sigma_x2, sv = s.sigma_v2, sy = sx + sv;
  const double dx = d * sx - kx * kx, dy = d * sy - ky * ky;
  if (dx <= 0 || dy <= 0) return kInf;
  const double odd_y = 0.5 * std::log2(sx * sv / dy);
  const double odd_x = 0.5 * std::log2((sx * sv / sy) * (d + sx - 2 * kx) / dx);
  const double even_y = 0.5 * std::log2(sv * d / dy);
  return std::max(0.0, std::max(odd_y, odd_x)) + std::max(0.0, even_y);
}

double dense_oracle(const GaussianPair& s, double d, int n) {
  const double rx = std::sqrt(d * s.sigma_x2), ry = std::sqrt(d * s.sigma_y2());
  double best = kInf;
  for (int i = 0; i < n; ++i) {
    const double kx = -rx + 2 * rx * (i + 0.5) / n;
    for (int j = 0; j < n; ++j) {
      const double ky = -ry + 2 * ry * (j + 0.5) / n;
      best = std::min(best, oracle_sum_rate(s, d, kx, ky));
    }
  }
  return best;
}

Outcome criterion1() {
  const auto grid = default_ratio_grid(kSrc);
  const auto curve = ratio_curve(kSrc, grid);
  std::ostringstream why;
  bool ok = curve.size() == 64;
  for (const auto& p : curve) {
    if (p.r_cr > 0 && !(p.ratio && *p.ratio >= 0.0 && *p.ratio <= 1.0)) {
      ok = false;
      why << " ratio out of [0,1] at d=" << p.d << ";";
    }
  }
  // Upper half: non-increasing; past d = sigma_x2 sigma_v2 / sigma_y2 the
  // ratio is exactly 0, so strict decrease is not required.
  double last = kInf;
  for (std::size_t i = curve.size() / 2; i < curve.size(); ++i) {
    const double r = curve[i].ratio.value_or(0.0);
    if (r > last + 1e-12) {
      ok = false;
      why << " increase at d=" << curve[i].d << ";";
    }
    last = r;
  }
  const double final_ratio = curve.back().ratio.value_or(0.0);
  if (!(final_ratio < 0.2)) ok = false;

  // Dense-grid oracle at a few upper-half points.
  double worst = 0;
  for (std::size_t i : {32ul, 40ul, 48ul, 63ul}) {
    const double oracle = dense_oracle(kSrc, grid[i], 1024);
    worst = std::max(worst, std::abs(oracle - curve[i].r_sum_star));
  }
  if (worst > 1e-3) ok = false;
  return {ok, "final ratio " + fmt("%.4g", final_ratio) + ", oracle max diff " +
                  fmt("%.2e", worst) + " bits" + why.str()};
}

Outcome criterion2() {
  const double r1 = r_cr_oneway(kSrc, 1.0), r4 = r_cr_oneway(kSrc, 4.0);
  const auto b = thm2_bounds(kSrc, {0, 0}, {1, 0}, {kInf, 1.0}, {});
  const bool ok = std::abs(r1 - 0.6610) <= 1e-3 && r4 == 0.0 &&
                  std::abs(b.rates.r_odd - 0.6610) <= 1e-3 && b.rates.r_even == 0.0;
  return {ok, "R_CR(1)=" + fmt("%.6f", r1) + " R_CR(4)=" + fmt("%g", r4) + " r_odd=" +
                  fmt("%.6f", b.rates.r_odd) + " r_even=" + fmt("%g", b.rates.r_even)};
}

// Ranges: sigma_x2, sigma_v2 in [0.5, 8]; alpha, beta in [-2, 2]; each target
// D_k = u * var(f_k(X, Y)) with u in [0.05, 1].
Outcome criterion3() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> var(0.5, 8), coef(-2, 2), frac(0.05, 1);
  int inside = 0, below = 0, above = 0, not_found = 0;
  double worst_gap = 0;
  for (int i = 0; i < 50; ++i) {
    const GaussianPair s{var(rng), var(rng)};
    const LinearFn fa{coef(rng), coef(rng)}, fb{coef(rng), coef(rng)};
    auto variance = [&](const LinearFn& f) {
      const double a = f.alpha + f.beta;
      return a * a * s.sigma_x2 + f.beta * f.beta * s.sigma_v2;
    };
    const DistortionPair d{frac(rng) * variance(fa), frac(rng) * variance(fb)};
    const AchievabilityReport r = verify_achievability(s, fa, fb, d);
    if (!r.found) {
      ++not_found;
      continue;
    }
    const double gap = r.achieved_sum_rate - r.bound.objective;
    worst_gap = std::max(worst_gap, gap);
    if (gap < -1e-9) {
      ++below;
    } else if (gap > 1e-2) {
      ++above;
    } else {
      ++inside;
    }
  }
  return {inside == 50, std::to_string(inside) + "/50 within [bound-1e-9, bound+1e-2]; " +
                            std::to_string(above) + " above, " + std::to_string(below) +
                            " below, " + std::to_string(not_found) +
                            " without a feasible channel; largest gap " +
                            fmt("%.4f", worst_gap) + " bits"};
}

// Monotone non-increasing along both axes and midpoint convex along rows,
// columns and diagonals of a uniform grid. +inf marks infeasible points.
// Returns "ok, <range>" or a description of the violations.
std::string grid_violations(const std::vector<std::vector<double>>& v, double slack) {
  const int n = static_cast<int>(v.size());
  int mono = 0, convex = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i + 1 < n && v[i + 1][j] > v[i][j] + slack) ++mono;
      if (j + 1 < n && v[i][j + 1] > v[i][j] + slack) ++mono;
      const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
      for (const auto& dir : dirs) {
        const int i2 = i + 2 * dir[0], j2 = j + 2 * dir[1];
        if (i2 >= n || j2 < 0 || j2 >= n) continue;
        const double lo = v[i][j], hi = v[i2][j2], mid = v[i + dir[0]][j + dir[1]];
        if (std::isinf(lo) || std::isinf(hi)) continue;
        if (mid > 0.5 * (lo + hi) + slack) ++convex;
      }
    }
  }
  double lo = kInf, hi = 0;
  for (const auto& row : v) {
    for (double x : row) {
      lo = std::min(lo, x);
      if (std::isfinite(x)) hi = std::max(hi, x);
    }
  }
  const std::string range = "values " + fmt("%.4f", lo) + ".." + fmt("%.4f", hi) + " bits";
  if (mono == 0 && convex == 0) return "ok, " + range;
  return range + ", " + std::to_string(mono) + " monotonicity and " + std::to_string(convex) +
         " convexity violations";
}

Outcome criterion4() {
  const LinearFn fa{1.0, 0.5}, fb{0.3, 1.0};
  std::vector<std::vector<double>> g(10, std::vector<double>(10));
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const DistortionPair d{0.2 + 0.4 * i, 0.2 + 0.4 * j};
      g[i][j] = min_sum_rate(kSrc, fa, fb, d, {}).objective;
    }
  }
  const std::string gauss = grid_violations(g, 1e-6);

  DiscreteProblem p;
  p.pxy = {0.4, 0.1, 0.15, 0.35};
  p.rounds = 2;
  p.f_a = {0, 1, 1, 0};
  p.f_b = {0, 0, 1, 1};
  p.d_a = p.d_b = p.d_ab = p.d_ba = hamming_table(2);
  const std::size_t q = 6;
  SearchOptions o;
  o.q = q;
  o.mode = DecoderMode::kCommon;
  o.sizes.u = {2, 2};
  std::vector<std::vector<double>> h(5, std::vector<double>(5));
  int infeasible = 0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      p.targets = {0.1 + 0.05 * i, 0.1 + 0.05 * j, kInf, kInf};
      try {
        h[i][j] = min_rates_search(p, o).objective;
      } catch (const InfeasibleError&) {
        h[i][j] = kInf;
        ++infeasible;
      }
    }
  }
  const std::string disc = grid_violations(h, 2.0 / q);
  const bool ok = gauss.starts_with("ok") && disc.starts_with("ok");
  return {ok, "gaussian 10x10: " + gauss + "; discrete 5x5 at q=6: " + disc +
                  " (" + std::to_string(infeasible) + " infeasible targets)"};
}

// Random full-support binary instance; targets are fractions of the trivial
// (constant-guess) distortion.
DiscreteProblem random_binary(std::mt19937_64& g, int rounds) {
  DiscreteProblem p;
  std::uniform_real_distribution<double> u(0.05, 1);
  double a[4], s = 0;
  for (double& v : a) s += (v = u(g));
  for (double v : a) p.pxy.push_back(v / s);
  p.pxy[3] = 1 - (p.pxy[0] + p.pxy[1] + p.pxy[2]);
  p.rounds = rounds;
  std::uniform_int_distribution<int> bit(0, 1);
  for (int i = 0; i < 4; ++i) {
    p.f_a.push_back(bit(g));
    p.f_b.push_back(bit(g));
  }
  p.d_a = p.d_b = p.d_ab = p.d_ba = hamming_table(2);
  std::uniform_real_distribution<double> frac(0.3, 0.9);
  auto trivial = [&](const std::vector<std::size_t>& f) {
    double ones = 0;
    for (int i = 0; i < 4; ++i) ones += f[i] ? p.pxy[i] : 0.0;
    return std::min(ones, 1 - ones);
  };
  p.targets = {frac(g) * trivial(p.f_a), frac(g) * trivial(p.f_b), 0, 0};
  return p;
}

Outcome criterion5() {
  std::mt19937_64 rng(2024);
  int matches = 0, total = 0;
  std::ostringstream why;
  for (int i = 0; i < 5; ++i) {
    const int rounds = i < 3 ? 1 : 2;
    const std::vector<std::size_t> u =
        rounds == 1 ? std::vector<std::size_t>{3} : std::vector<std::size_t>{2, 2};
    DiscreteProblem p;
    for (;;) {
      p = random_binary(rng, rounds);
      SearchOptions o;
      o.q = 4;
      o.sizes.u = u;
      try {
        min_rates_search(p, o);
        break;
      } catch (const InfeasibleError&) {
      }
    }
    for (std::size_t q : {4, 6, 8}) {
      SearchOptions o;
      o.q = q;
      o.sizes.u = u;
      double r[2];
      for (int m = 0; m < 2; ++m) {
        o.mode = m ? DecoderMode::kConstrained : DecoderMode::kCommon;
        try {
          r[m] = min_rates_search(p, o).objective;
        } catch (const InfeasibleError&) {
          r[m] = kInf;
        }
      }
      ++total;
      if (r[0] == r[1]) {
        ++matches;
      } else {
        why << " instance " << i << " q=" << q << ": " << r[0] << " vs " << r[1] << ";";
      }
    }
  }
  return {matches == total,
          std::to_string(matches) + "/" + std::to_string(total) + " exact matches" + why.str()};
}

Outcome criterion6() {
  const double c = 0.11;
  DiscreteProblem p;
  p.pxy = {(1 - c) / 2, c / 2, c / 2, (1 - c) / 2};
  p.rounds = 1;
  p.f_a = {0, 0, 0, 0};
  p.f_b = {0, 0, 1, 1};
  p.d_a = p.d_b = p.d_ab = p.d_ba = hamming_table(2);
  p.targets = {kInf, 0.0, kInf, kInf};
  SearchOptions o;
  o.q = 8;
  o.mode = DecoderMode::kCommon;
  o.sizes = default_sizes(p, o.mode);
  const double r = min_rates_search(p, o).objective;
  const double h = -c * std::log2(c) - (1 - c) * std::log2(1 - c);
  return {std::abs(r - h) <= 0.05,
          "min R1 " + fmt("%.6f", r) + " vs h2(0.11) " + fmt("%.6f", h) + " bits"};
}

Outcome criterion7() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> pos(0.3, 6), gain(-1.5, 1.5);
  int ok = 0;
  double worst = 0;
  bool identical = true;
  for (int i = 0; i < 20; ++i) {
    const GaussianPair s{pos(rng), pos(rng)};
    const TestChannels tc{gain(rng), pos(rng), gain(rng), pos(rng)};
    const LinearFn fa{gain(rng), gain(rng)}, fb{gain(rng), gain(rng)};
    SimConfig cfg;
    cfg.n = 1'000'000;
    cfg.seed = 1000 + i;
    const SimResult r = simulate_linear(s, tc, fa, fb, cfg);
    const AchievedPoint ap = achieved_point(s, tc, fa, fb);
    const double za = std::abs(r.d_a - ap.d_a) / r.se_a;
    const double zb = std::abs(r.d_b - ap.d_b) / r.se_b;
    worst = std::max({worst, za, zb});
    if (za <= 4 && zb <= 4) ++ok;
    if (i < 3) {
      const SimResult again = simulate_linear(s, tc, fa, fb, cfg);
      identical = identical && again.d_a == r.d_a && again.d_b == r.d_b &&
                  again.se_a == r.se_a && again.se_b == r.se_b;
    }
  }
  return {ok == 20 && identical, std::to_string(ok) + "/20 within 4 SE (max " +
                                     fmt("%.2f", worst) + " SE); rerun " +
                                     (identical ? "bit-identical" : "differs")};
}

Outcome criterion8() {
  SimConfig cfg;
  cfg.n = 1'000'000;
  cfg.seed = 8;
  cfg.schedule = Schedule::kSequentialA;
  const double seq = simulate_indicator_schedule(kSrc, 16, cfg).d_a;
  cfg.schedule = Schedule::kSimultaneous;
  double min_sim = kInf;
  for (int bits = 1; bits <= 16; ++bits) {
    min_sim = std::min(min_sim, simulate_indicator_schedule(kSrc, bits, cfg).d_a);
  }
  return {seq < 1e-3 && min_sim > 0.01, "sequential " + fmt("%.3g", seq) +
                                            " at 16 bits; smallest simultaneous " +
                                            fmt("%.4f", min_sim)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Outcome()> criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                               criterion5, criterion6, criterion7, criterion8};
  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    only = std::atoi(argv[2]);
    if (only < 1 || only > 8) {
      std::fprintf(stderr, "criterion must be in 1..8\n");
      return 2;
    }
  } else if (argc != 1) {
    std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
    return 2;
  }
  bool all = true;
  for (int i = 1; i <= 8; ++i) {
    if (only && i != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s - %s (%.2f s)\n", i, o.passed ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
