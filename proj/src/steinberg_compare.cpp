#include "ircr/steinberg_compare.hpp"

#include <cmath>

namespace ircr {

double r_cr_oneway(const GaussianPair& src, double d) {
  src.validate();
  if (std::isnan(d) || d <= 0.0) {
    throw InputError("distortion d must be positive");
  }
  if (std::isinf(d)) return 0.0;
  const double arg = src.sigma_x2 / src.sigma_y2() * (d + src.sigma_v2) / d;
  return std::max(0.5 * std::log2(arg), 0.0);
}

double r_sum_star(const GaussianPair& src, double d,
                  const KappaSearchConfig& cfg) {
  if (std::isnan(d) || d <= 0.0) {
    throw InputError("distortion d must be positive");
  }
  const LinearFn constant{0.0, 0.0};
  const LinearFn x_only{1.0, 0.0};
  return min_sum_rate(src, constant, x_only, DistortionPair{kInf, d},
                      Weights{1.0, 1.0}, cfg)
      .objective;
}

std::vector<RatioCurvePoint> ratio_curve(const GaussianPair& src,
                                         const std::vector<double>& d_grid,
                                         const KappaSearchConfig& cfg) {
  std::vector<RatioCurvePoint> out;
  out.reserve(d_grid.size());
  for (double d : d_grid) {
    RatioCurvePoint p;
    p.d = d;
    p.r_cr = r_cr_oneway(src, d);
    p.r_sum_star = r_sum_star(src, d, cfg);
    if (p.r_cr > 0.0) p.ratio = p.r_sum_star / p.r_cr;
    out.push_back(p);
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo && n >= 1)) {
    throw InputError("log grid needs 0 < lo <= hi and n >= 1");
  }
  std::vector<double> g(n);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : std::exp(l0 + (l1 - l0) * i / (n - 1));
  }
  if (n > 1) {
    g.front() = lo;
    g.back() = hi;
  }
  return g;
}

std::vector<double> default_ratio_grid(const GaussianPair& src, int n) {
  src.validate();
  return log_spaced(0.0125 * src.sigma_x2, 0.9875 * src.sigma_x2, n);
}

}  // namespace ircr
