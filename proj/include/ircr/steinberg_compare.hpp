#pragma once

// One-way common-reconstruction rate versus the minimal two-way interactive
// sum rate for estimating X at terminal B (terminal A computes a constant).

#include <optional>
#include <vector>

#include "ircr/region_gaussian.hpp"

namespace ircr {

struct RatioCurvePoint {
  double d = 0.0;
  double r_cr = 0.0;        // bits
  double r_sum_star = 0.0;  // bits
  // r_sum_star / r_cr; empty where r_cr == 0.
  std::optional<double> ratio;
};

// 1/2 log2( sx/(sx+sv) * (d+sv)/d ), clamped at 0. Throws InputError for d <= 0.
double r_cr_oneway(const GaussianPair& src, double d);

// Minimal r_odd + r_even over kappa with f_A = constant and f_B = X.
double r_sum_star(const GaussianPair& src, double d,
                  const KappaSearchConfig& cfg = {});

std::vector<RatioCurvePoint> ratio_curve(const GaussianPair& src,
                                         const std::vector<double>& d_grid,
                                         const KappaSearchConfig& cfg = {});

// n log-spaced distortions in [0.0125, 0.9875] * sigma_x2, i.e. [0.05, 3.95]
// for sigma_x2 = 4. The one-way rate reaches zero at d = sigma_x2.
std::vector<double> default_ratio_grid(const GaussianPair& src, int n = 64);

std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace ircr
