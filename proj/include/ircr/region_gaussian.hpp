#pragma once

// Sum-rate lower bounds of the two-terminal Gaussian region with common
// reconstruction, their minimization over the free kappa parameters, tracing
// of the (odd, even) sum-rate trade-off, and the achievability check of the
// two-round linear scheme against the bound.

#include <optional>
#include <string>
#include <vector>

#include "ircr/gaussian_core.hpp"

namespace ircr {

struct DistortionPair {
  double d_a = 0.0;
  double d_b = 0.0;

  // +inf is accepted and means "no constraint at that terminal".
  void validate() const;
};

// Sum of odd-round (A -> B) and even-round (B -> A) rates, in bits.
struct RatePoint {
  double r_odd = 0.0;
  double r_even = 0.0;
};

struct Weights {
  double w_odd = 1.0;
  double w_even = 1.0;

  void validate() const;
  // 0 * inf is taken as 0: a zero weight ignores its direction.
  double objective(const RatePoint& r) const;
};

// Per-terminal log terms, before the max over terminals. Naming follows the
// variable each term depends on:
//   odd_y  = 1/2 log(alpha^2 sx sv / (D sy - ky^2))
//   odd_x  = 1/2 log((sx sv / sy) (D + alpha^2 sx - 2 alpha kx) / (D sx - kx^2))
//   even_x = 1/2 log(beta^2 sx sv / (D sx - kx^2))
//   even_y = 1/2 log(sv (D + beta^2 sy - 2 beta ky) / (D sy - ky^2))
// A dropped term is -inf; an infeasible one is +inf.
struct TerminalTerms {
  double odd_x = -kInf;
  double odd_y = -kInf;
  double even_x = -kInf;
  double even_y = -kInf;
};

struct BoundEvaluation {
  RatePoint rates;
  TerminalTerms terms_a;
  TerminalTerms terms_b;
  // Set when a bound is +inf: which term caused it, e.g. "odd_x[B]".
  std::optional<std::string> infinite_term;
};

// Both sum-rate bounds at a fixed kappa. Terms with a zero leading
// coefficient and all terms of a constant function or of an unconstrained
// terminal (d = +inf) drop out. After the max over terminals each bound is
// clamped at 0.
BoundEvaluation thm2_bounds(const GaussianPair& src, const LinearFn& fa,
                            const LinearFn& fb, const DistortionPair& d,
                            const KappaVec& kap);

// Single-term evaluators, exposed for the search and for tests.
TerminalTerms terminal_terms(const GaussianPair& src, const LinearFn& f,
                             double d, double kx, double ky);

struct KappaSearchConfig {
  int grid_points = 64;       // per kappa axis
  double margin = 1e-6;       // relative shrink of each feasible interval
  int sweeps = 3;             // coordinate-descent sweeps
  double tol_bits = 1e-9;     // sweep convergence tolerance
};

struct MinSumRate {
  RatePoint rates;
  KappaVec kappa;
  double objective = 0.0;
};

// Minimizes w_odd * r_odd + w_even * r_even over KappaVec: coarse grid over
// the shrunk feasible box, then golden-section coordinate descent.
// Deterministic; grid ties go to the lexicographically smallest kappa.
// Throws InfeasibleError when the objective is +inf everywhere.
MinSumRate min_sum_rate(const GaussianPair& src, const LinearFn& fa,
                        const LinearFn& fb, const DistortionPair& d,
                        const Weights& w, const KappaSearchConfig& cfg = {});

struct AchievabilityConfig {
  double gain_min = -2.0;
  double gain_max = 2.0;
  double gain_step = 1.0 / 32.0;
  // Noise variances searched over [noise_min, noise_max] * sigma_x2.
  double noise_min = 1e-4;
  double noise_max = 1e2;
  int refine_sweeps = 3;
  double match_tol_bits = 1e-2;
  double below_tol_bits = 1e-9;
  KappaSearchConfig bound;
};

struct AchievabilityReport {
  bool found = false;           // some channel meets both distortion targets
  TestChannels channels;        // best channel found
  AchievedPoint achieved;       // its rates and distortions
  double achieved_sum_rate = kInf;
  MinSumRate bound;             // min_sum_rate with weights (1, 1)
  double gap_bits = kInf;       // achieved - bound
  bool never_below_bound = false;
  bool within_match_tol = false;
  // When !found: smallest max_k(D_k - d_k) excess seen.
  double closest_excess = kInf;
};

// Searches the two-round linear scheme (U1 = a1 X + N1, U2 = a2 Y + N2,
// Zhat_k = alpha_k U1 + beta_k U2) for the smallest R1 + R2 meeting
// D_k <= d_k, and compares it with the bound.
AchievabilityReport verify_achievability(const GaussianPair& src,
                                         const LinearFn& fa,
                                         const LinearFn& fb,
                                         const DistortionPair& d,
                                         const AchievabilityConfig& cfg = {});

struct TracePoint {
  double theta = 0.0;
  Weights weights;
  RatePoint rates;
  KappaVec kappa;
};

// Sweeps (w_odd, w_even) = (cos t, sin t), t in [0, pi/2], and returns the
// Pareto-filtered lower-left staircase: r_odd strictly increasing, r_even
// strictly decreasing.
std::vector<TracePoint> boundary_trace(const GaussianPair& src,
                                       const LinearFn& fa, const LinearFn& fb,
                                       const DistortionPair& d, int n_points,
                                       const KappaSearchConfig& cfg = {});

}  // namespace ircr
