#include "ircr/region_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ircr {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

double half_log2(double x) { return 0.5 * std::log2(x); }

// 1/2 log2(scale * num / den) with the drop/infeasible conventions.
double log_term(double scale, double num, double den) {
  if (den <= 0.0) return kInf;
  if (num <= 0.0) return -kInf;
  return half_log2(scale * num / den);
}

bool terminal_active(const LinearFn& f, double d) {
  return !f.is_constant() && std::isfinite(d);
}

double clamp_rate(double v) { return std::max(v, 0.0); }

// Lexicographic (objective, tie-break) value used by the coordinate descent.
// The tie-break is the weighted sum of all finite terms; it lets a coordinate
// move while the max is pinned by another coordinate's term.
struct Score {
  double primary = kInf;
  double secondary = kInf;

  bool better_than(const Score& o) const {
    if (primary != o.primary) return primary < o.primary;
    return secondary < o.secondary;
  }
};

// The objective factors by kappa axis: axis 0..3 = kx_A, ky_A, kx_B, ky_B.
// Each axis carries exactly one odd-direction and one even-direction term.
class KappaObjective {
 public:
  KappaObjective(const GaussianPair& src, const LinearFn& fa,
                 const LinearFn& fb, const DistortionPair& d, const Weights& w)
      : src_(src), fa_(fa), fb_(fb), d_(d), w_(w) {
    active_ = {terminal_active(fa, d.d_a), terminal_active(fa, d.d_a),
               terminal_active(fb, d.d_b), terminal_active(fb, d.d_b)};
    const double sx = src.sigma_x2, sy = src.sigma_y2();
    radius_ = {active_[0] ? std::sqrt(d.d_a * sx) : 0.0,
               active_[1] ? std::sqrt(d.d_a * sy) : 0.0,
               active_[2] ? std::sqrt(d.d_b * sx) : 0.0,
               active_[3] ? std::sqrt(d.d_b * sy) : 0.0};
  }

  bool active(int axis) const { return active_[axis]; }
  double radius(int axis) const { return radius_[axis]; }

  // (odd term, even term) contributed by one axis at value k.
  std::pair<double, double> axis_terms(int axis, double k) const {
    const bool is_a = axis < 2;
    const LinearFn& f = is_a ? fa_ : fb_;
    const double d = is_a ? d_.d_a : d_.d_b;
    if (!terminal_active(f, d)) return {-kInf, -kInf};
    const TerminalTerms t = (axis % 2 == 0) ? terminal_terms(src_, f, d, k, 0.0)
                                            : terminal_terms(src_, f, d, 0.0, k);
    return (axis % 2 == 0) ? std::pair{t.odd_x, t.even_x}
                           : std::pair{t.odd_y, t.even_y};
  }

  RatePoint rates(const std::array<double, 4>& k) const {
    double odd = -kInf, even = -kInf;
    for (int a = 0; a < 4; ++a) {
      auto [o, e] = axis_terms(a, k[a]);
      odd = std::max(odd, o);
      even = std::max(even, e);
    }
    return {clamp_rate(odd), clamp_rate(even)};
  }

  Score score(const std::array<double, 4>& k) const {
    Score s;
    s.primary = w_.objective(rates(k));
    double tie = 0.0;
    for (int a = 0; a < 4; ++a) {
      if (!active_[a]) continue;
      auto [o, e] = axis_terms(a, k[a]);
      for (auto [term, weight] : {std::pair{o, w_.w_odd}, {e, w_.w_even}}) {
        if (weight == 0.0 || term == -kInf) continue;
        tie += weight * term;
      }
    }
    s.secondary = tie;
    return s;
  }

 private:
  GaussianPair src_;
  LinearFn fa_, fb_;
  DistortionPair d_;
  Weights w_;
  std::array<bool, 4> active_{};
  std::array<double, 4> radius_{};
};

// Golden-section minimization of score along one axis inside [lo, hi].
template <typename Eval>
std::pair<double, Score> golden_section(Eval&& eval, double lo, double hi) {
  double a = lo, b = hi;
  double c = b - kGoldenRatio * (b - a);
  double d = a + kGoldenRatio * (b - a);
  Score fc = eval(c), fd = eval(d);
  const double eps = 1e-13 * std::max({std::abs(lo), std::abs(hi), 1e-300});
  for (int it = 0; it < 200 && (b - a) > eps; ++it) {
    if (fc.better_than(fd) || !fd.better_than(fc)) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGoldenRatio * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGoldenRatio * (b - a);
      fd = eval(d);
    }
  }
  return fc.better_than(fd) ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

void DistortionPair::validate() const {
  if (std::isnan(d_a) || d_a < 0.0) {
    throw InputError("d_a must be a nonnegative distortion");
  }
  if (std::isnan(d_b) || d_b < 0.0) {
    throw InputError("d_b must be a nonnegative distortion");
  }
}

void Weights::validate() const {
  if (!(std::isfinite(w_odd) && w_odd >= 0.0)) {
    throw InputError("w_odd must be a nonnegative finite weight");
  }
  if (!(std::isfinite(w_even) && w_even >= 0.0)) {
    throw InputError("w_even must be a nonnegative finite weight");
  }
  if (w_odd == 0.0 && w_even == 0.0) {
    throw InputError("weights must not both be zero");
  }
}

double Weights::objective(const RatePoint& r) const {
  double v = 0.0;
  if (w_odd != 0.0) v += w_odd * r.r_odd;
  if (w_even != 0.0) v += w_even * r.r_even;
  return v;
}

TerminalTerms terminal_terms(const GaussianPair& src, const LinearFn& f,
                             double d, double kx, double ky) {
  TerminalTerms t;
  if (!terminal_active(f, d)) return t;
  const double sx = src.sigma_x2, sv = src.sigma_v2, sy = src.sigma_y2();
  const double a = f.alpha, b = f.beta;
  const double den_x = d * sx - kx * kx;
  const double den_y = d * sy - ky * ky;

  if (a != 0.0) t.odd_y = log_term(1.0, a * a * sx * sv, den_y);
  t.odd_x = log_term(sx * sv / sy, d + a * a * sx - 2.0 * a * kx, den_x);
  if (b != 0.0) t.even_x = log_term(1.0, b * b * sx * sv, den_x);
  t.even_y = log_term(sv, d + b * b * sy - 2.0 * b * ky, den_y);
  return t;
}

BoundEvaluation thm2_bounds(const GaussianPair& src, const LinearFn& fa,
                            const LinearFn& fb, const DistortionPair& d,
                            const KappaVec& kap) {
  src.validate();
  fa.validate();
  fb.validate();
  d.validate();
  BoundEvaluation out;
  out.terms_a = terminal_terms(src, fa, d.d_a, kap.kx_a, kap.ky_a);
  out.terms_b = terminal_terms(src, fb, d.d_b, kap.kx_b, kap.ky_b);

  struct Named {
    const char* name;
    double value;
    bool odd;
  };
  const TerminalTerms& ta = out.terms_a;
  const TerminalTerms& tb = out.terms_b;
  const Named all[] = {
      {"odd_y[A]", ta.odd_y, true},    {"odd_x[A]", ta.odd_x, true},
      {"odd_y[B]", tb.odd_y, true},    {"odd_x[B]", tb.odd_x, true},
      {"even_x[A]", ta.even_x, false}, {"even_y[A]", ta.even_y, false},
      {"even_x[B]", tb.even_x, false}, {"even_y[B]", tb.even_y, false},
  };
  double odd = -kInf, even = -kInf;
  for (const Named& n : all) {
    (n.odd ? odd : even) = std::max(n.odd ? odd : even, n.value);
    if (n.value == kInf && !out.infinite_term) out.infinite_term = n.name;
  }
  out.rates = {clamp_rate(odd), clamp_rate(even)};
  return out;
}

MinSumRate min_sum_rate(const GaussianPair& src, const LinearFn& fa,
                        const LinearFn& fb, const DistortionPair& d,
                        const Weights& w, const KappaSearchConfig& cfg) {
  src.validate();
  fa.validate();
  fb.validate();
  d.validate();
  w.validate();
  if (cfg.grid_points < 2) throw InputError("grid_points must be >= 2");
  if (!(cfg.margin >= 0.0 && cfg.margin < 1.0)) {
    throw InputError("margin must lie in [0, 1)");
  }

  const KappaObjective obj(src, fa, fb, d, w);

  // Grid per axis over the shrunk interval; inactive axes pinned at 0.
  std::array<std::vector<double>, 4> grid;
  std::array<double, 4> half_width{};
  std::array<double, 4> spacing{};
  for (int a = 0; a < 4; ++a) {
    if (!obj.active(a)) {
      grid[a] = {0.0};
      continue;
    }
    half_width[a] = obj.radius(a) * (1.0 - cfg.margin);
    const int g = half_width[a] > 0.0 ? cfg.grid_points : 1;
    grid[a].resize(g);
    for (int i = 0; i < g; ++i) {
      grid[a][i] = g == 1 ? 0.0 : -half_width[a] + 2.0 * half_width[a] * i / (g - 1);
    }
    spacing[a] = g > 1 ? 2.0 * half_width[a] / (g - 1) : 0.0;
  }

  // Precompute per-axis term tables; the grid sweep is then max/add only.
  std::array<std::vector<double>, 4> odd_t, even_t;
  for (int a = 0; a < 4; ++a) {
    for (double k : grid[a]) {
      auto [o, e] = obj.axis_terms(a, k);
      odd_t[a].push_back(o);
      even_t[a].push_back(e);
    }
  }

  double best = kInf;
  std::array<std::size_t, 4> best_idx{0, 0, 0, 0};
  bool any = false;
  for (std::size_t i = 0; i < grid[0].size(); ++i) {
    for (std::size_t j = 0; j < grid[1].size(); ++j) {
      const double o01 = std::max(odd_t[0][i], odd_t[1][j]);
      const double e01 = std::max(even_t[0][i], even_t[1][j]);
      for (std::size_t k = 0; k < grid[2].size(); ++k) {
        const double o012 = std::max(o01, odd_t[2][k]);
        const double e012 = std::max(e01, even_t[2][k]);
        for (std::size_t l = 0; l < grid[3].size(); ++l) {
          const RatePoint r{clamp_rate(std::max(o012, odd_t[3][l])),
                            clamp_rate(std::max(e012, even_t[3][l]))};
          const double v = w.objective(r);
          if (!any || v < best) {
            best = v;
            best_idx = {i, j, k, l};
            any = true;
          }
        }
      }
    }
  }
  if (best == kInf) {
    throw InfeasibleError(
        "sum-rate objective is +inf over the whole kappa box (zero distortion "
        "target for a non-constant function?)");
  }

  std::array<double, 4> kappa{};
  for (int a = 0; a < 4; ++a) kappa[a] = grid[a][best_idx[a]];

  Score current = obj.score(kappa);
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    const Score start = current;
    for (int a = 0; a < 4; ++a) {
      if (!obj.active(a) || spacing[a] == 0.0) continue;
      const double lo = std::max(-half_width[a], kappa[a] - spacing[a]);
      const double hi = std::min(half_width[a], kappa[a] + spacing[a]);
      auto eval = [&](double k) {
        std::array<double, 4> trial = kappa;
        trial[a] = k;
        return obj.score(trial);
      };
      auto [k_new, s_new] = golden_section(eval, lo, hi);
      if (s_new.better_than(current)) {
        kappa[a] = k_new;
        current = s_new;
      }
    }
    const bool primary_stalled = start.primary - current.primary < cfg.tol_bits;
    const bool secondary_stalled =
        !(start.secondary - current.secondary >= cfg.tol_bits);
    if (primary_stalled && secondary_stalled) break;
  }

  MinSumRate out;
  out.kappa = KappaVec::from_array(kappa);
  out.rates = obj.rates(kappa);
  out.objective = w.objective(out.rates);
  return out;
}

namespace {

struct InnerResult {
  double sum_rate = kInf;
  TestChannels tc;
  double excess = kInf;  // smallest reachable max_k(D_k - d_k) at these gains
};

bool meets(double achieved, double target) {
  if (!std::isfinite(target)) return true;
  return achieved <= target * (1.0 + 1e-12) + 1e-15;
}

// For fixed gains the distortions are affine in the noise variances:
//   D_k = c_k + alpha_k^2 n1 + beta_k^2 n2,
// and each rate decreases in its own noise. Optimize the noises exactly up to
// a 1-D search along the boundary of the feasible region.
class NoiseOptimizer {
 public:
  NoiseOptimizer(const GaussianPair& src, const LinearFn& fa,
                 const LinearFn& fb, const DistortionPair& d,
                 const AchievabilityConfig& cfg)
      : src_(src), f_{fa, fb}, d_{d.d_a, d.d_b} {
    n_lo_ = cfg.noise_min * src.sigma_x2;
    n_hi_ = cfg.noise_max * src.sigma_x2;
  }

  InnerResult solve(double a1, double a2) const {
    InnerResult r;
    const TestChannels base{a1, 0.0, a2, 0.0};
    std::array<double, 2> slack{}, c1{}, c2{};
    for (int k = 0; k < 2; ++k) {
      const double c = decoding_error(src_, base, f_[k]).variance;
      slack[k] = std::isfinite(d_[k]) ? d_[k] - c : kInf;
      c1[k] = f_[k].alpha * f_[k].alpha;
      c2[k] = f_[k].beta * f_[k].beta;
    }
    const bool use1 = a1 != 0.0, use2 = a2 != 0.0;
    const double lo1 = use1 ? n_lo_ : 0.0;
    const double lo2 = use2 ? n_lo_ : 0.0;

    r.excess = -kInf;
    for (int k = 0; k < 2; ++k) {
      if (!std::isfinite(slack[k])) continue;
      r.excess = std::max(r.excess, c1[k] * lo1 + c2[k] * lo2 - slack[k]);
    }
    if (!meets_all(slack, c1, c2, lo1, lo2)) return r;

    // Largest n2 compatible with n1 (capped at n_hi).
    auto n2_for = [&](double n1) {
      double n2 = use2 ? n_hi_ : 0.0;
      if (!use2) return n2;
      for (int k = 0; k < 2; ++k) {
        if (c2[k] == 0.0 || !std::isfinite(slack[k])) continue;
        n2 = std::min(n2, (slack[k] - c1[k] * n1) / c2[k]);
      }
      return n2;
    };
    double hi1 = use1 ? n_hi_ : 0.0;
    if (use1) {
      for (int k = 0; k < 2; ++k) {
        if (c1[k] == 0.0 || !std::isfinite(slack[k])) continue;
        hi1 = std::min(hi1, (slack[k] - c2[k] * lo2) / c1[k]);
      }
      if (hi1 < lo1) return r;
    }

    auto total = [&](double n1) {
      const double n2 = n2_for(n1);
      if (use2 && n2 < lo2) return kInf;
      if (!meets_all(slack, c1, c2, n1, n2)) return kInf;
      const ChannelRates cr =
          channel_rates_closed_form(src_, TestChannels{a1, n1, a2, n2});
      return cr.r1 + cr.r2;
    };

    double best_n1 = lo1;
    double best = total(lo1);
    if (use1 && hi1 > lo1) {
      // Coarse log-spaced scan, then golden refinement around the winner.
      const int scan = 64;
      const double l0 = std::log(lo1), l1 = std::log(hi1);
      int best_i = -1;
      for (int i = 0; i < scan; ++i) {
        const double n1 = i == scan - 1 ? hi1 : std::exp(l0 + (l1 - l0) * i / (scan - 1));
        const double v = total(n1);
        if (v < best) {
          best = v;
          best_n1 = n1;
          best_i = i;
        }
      }
      if (best_i >= 0) {
        const double step = (l1 - l0) / (scan - 1);
        const double ga = std::max(l0, l0 + step * (best_i - 1));
        const double gb = std::min(l1, l0 + step * (best_i + 1));
        auto eval = [&](double ln) { return Score{total(std::exp(ln)), 0.0}; };
        auto [ln, s] = golden_section(eval, ga, gb);
        if (s.primary < best) {
          best = s.primary;
          best_n1 = std::exp(ln);
        }
      }
    }
    if (best == kInf) return r;
    r.sum_rate = best;
    r.tc = TestChannels{a1, best_n1, a2, n2_for(best_n1)};
    if (!use2) r.tc.n2 = 0.0;
    return r;
  }

 private:
  static bool meets_all(const std::array<double, 2>& slack,
                        const std::array<double, 2>& c1,
                        const std::array<double, 2>& c2, double n1, double n2) {
    for (int k = 0; k < 2; ++k) {
      if (!std::isfinite(slack[k])) continue;
      const double used = c1[k] * n1 + c2[k] * n2;
      if (!(used <= slack[k] + 1e-12 * (std::abs(slack[k]) + 1.0))) return false;
    }
    return true;
  }

  GaussianPair src_;
  std::array<LinearFn, 2> f_;
  std::array<double, 2> d_;
  double n_lo_ = 0.0;
  double n_hi_ = 0.0;
};

}  // namespace

AchievabilityReport verify_achievability(const GaussianPair& src,
                                         const LinearFn& fa,
                                         const LinearFn& fb,
                                         const DistortionPair& d,
                                         const AchievabilityConfig& cfg) {
  src.validate();
  fa.validate();
  fb.validate();
  d.validate();
  if (!(d.d_a > 0.0 && d.d_b > 0.0)) {
    throw InputError("verify_achievability needs d_a > 0 and d_b > 0");
  }
  if (!(cfg.gain_step > 0.0 && cfg.gain_max >= cfg.gain_min)) {
    throw InputError("gain grid must have a positive step");
  }
  if (!(cfg.noise_min > 0.0 && cfg.noise_max > cfg.noise_min)) {
    throw InputError("noise range must satisfy 0 < noise_min < noise_max");
  }

  AchievabilityReport rep;
  rep.bound = min_sum_rate(src, fa, fb, d, Weights{1.0, 1.0}, cfg.bound);

  const NoiseOptimizer inner(src, fa, fb, d, cfg);
  const int n_gain =
      static_cast<int>(std::floor((cfg.gain_max - cfg.gain_min) / cfg.gain_step + 1e-9)) + 1;
  auto gain_at = [&](int i) { return cfg.gain_min + cfg.gain_step * i; };

  InnerResult best;
  for (int i = 0; i < n_gain; ++i) {
    for (int j = 0; j < n_gain; ++j) {
      const InnerResult r = inner.solve(gain_at(i), gain_at(j));
      rep.closest_excess = std::min(rep.closest_excess, r.excess);
      if (r.sum_rate < best.sum_rate) best = r;
    }
  }

  if (std::isfinite(best.sum_rate)) {
    std::array<double, 2> gains{best.tc.a1, best.tc.a2};
    for (int sweep = 0; sweep < cfg.refine_sweeps; ++sweep) {
      const double start = best.sum_rate;
      for (int c = 0; c < 2; ++c) {
        auto eval = [&](double g) {
          std::array<double, 2> trial = gains;
          trial[c] = g;
          return Score{inner.solve(trial[0], trial[1]).sum_rate, 0.0};
        };
        auto [g, s] = golden_section(eval, gains[c] - cfg.gain_step,
                                     gains[c] + cfg.gain_step);
        if (s.primary < best.sum_rate) {
          gains[c] = g;
          best = inner.solve(gains[0], gains[1]);
        }
      }
      if (start - best.sum_rate < cfg.bound.tol_bits) break;
    }
  }

  if (!std::isfinite(best.sum_rate)) {
    rep.found = false;
    return rep;
  }
  rep.found = true;
  rep.channels = best.tc;
  rep.achieved = achieved_point(src, best.tc, fa, fb);
  rep.found = meets(rep.achieved.d_a, d.d_a) && meets(rep.achieved.d_b, d.d_b);
  rep.achieved_sum_rate = rep.achieved.r1 + rep.achieved.r2;
  rep.closest_excess = std::min(rep.closest_excess, 0.0);
  rep.gap_bits = rep.achieved_sum_rate - rep.bound.objective;
  rep.never_below_bound = rep.gap_bits >= -cfg.below_tol_bits;
  rep.within_match_tol = rep.never_below_bound && rep.gap_bits <= cfg.match_tol_bits;
  return rep;
}

std::vector<TracePoint> boundary_trace(const GaussianPair& src,
                                       const LinearFn& fa, const LinearFn& fb,
                                       const DistortionPair& d, int n_points,
                                       const KappaSearchConfig& cfg) {
  if (n_points < 2) throw InputError("n_points must be >= 2");
  std::vector<TracePoint> raw;
  raw.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    TracePoint p;
    p.theta = 0.5 * std::numbers::pi * i / (n_points - 1);
    if (i == 0) {
      p.weights = {1.0, 0.0};
    } else if (i == n_points - 1) {
      p.weights = {0.0, 1.0};
    } else {
      p.weights = {std::cos(p.theta), std::sin(p.theta)};
    }
    const MinSumRate m = min_sum_rate(src, fa, fb, d, p.weights, cfg);
    p.rates = m.rates;
    p.kappa = m.kappa;
    raw.push_back(p);
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const TracePoint& a, const TracePoint& b) {
                     if (a.rates.r_odd != b.rates.r_odd) {
                       return a.rates.r_odd < b.rates.r_odd;
                     }
                     return a.rates.r_even < b.rates.r_even;
                   });
  std::vector<TracePoint> front;
  for (const TracePoint& p : raw) {
    if (front.empty() || p.rates.r_even < front.back().rates.r_even) {
      front.push_back(p);
    }
  }
  return front;
}

}  // namespace ircr
