#include "ircr/region_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

namespace ircr {

namespace {

void check_table_size(const std::vector<double>& t, std::size_t n,
                      const char* field) {
  if (t.size() != n) {
    throw InputError(std::string(field) + " must have " + std::to_string(n) +
                     " entries, got " + std::to_string(t.size()));
  }
  for (double v : t) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      throw InputError(std::string(field) +
                       " entries must be finite and nonnegative");
    }
  }
}

void check_target(double v, const char* field) {
  if (std::isnan(v) || v < 0.0) {
    throw InputError(std::string("targets.") + field +
                     " must be nonnegative (inf allowed)");
  }
}

void check_rows(const std::vector<double>& ch, std::size_t rows, std::size_t m,
                const std::string& field) {
  if (ch.size() != rows * m) {
    throw InputError(field + " has wrong size");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = ch[r * m + i];
      if (!(std::isfinite(v) && v >= 0.0)) {
        throw InputError(field + " entries must be nonnegative");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw InputError(field + " row " + std::to_string(r) +
                       " does not sum to 1");
    }
  }
}

std::size_t product(const std::vector<std::size_t>& v, std::size_t end) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < end; ++i) p *= v[i];
  return p;
}

std::size_t argmin_row(const double* cost, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (cost[i] < cost[best]) best = i;
  }
  return best;
}

// Index helpers over the joint layout X, Y, W_A, W_B, U^t.
struct Layout {
  std::size_t nx, ny, wa, wb, nu;

  explicit Layout(const JointPmf& j)
      : nx(j.dims()[kAxisX]),
        ny(j.dims()[kAxisY]),
        wa(j.dims()[kAxisWA]),
        wb(j.dims()[kAxisWB]),
        nu(j.size() / (j.dims()[0] * j.dims()[1] * j.dims()[2] * j.dims()[3])) {}

  std::size_t cells_a() const { return nx * wa * nu; }
  std::size_t cells_b() const { return ny * wb * nu; }

  template <typename F>
  void for_each(const std::vector<double>& p, F&& f) const {
    std::size_t i = 0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t a = 0; a < wa; ++a)
          for (std::size_t b = 0; b < wb; ++b)
            for (std::size_t u = 0; u < nu; ++u, ++i) {
              const std::size_t ca = (x * wa + a) * nu + u;
              const std::size_t cb = (y * wb + b) * nu + u;
              f(p[i], x, y, u, ca, cb);
            }
  }
};

struct PairTables {
  std::vector<std::size_t> own;    // Zhat_k at terminal k
  std::vector<std::size_t> other;  // What at the other terminal
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Problem and sizes

void DiscreteProblem::validate() const {
  if (nx == 0 || ny == 0 || nz_a == 0 || nz_b == 0) {
    throw InputError("alphabet sizes must be positive");
  }
  check_table_size(pxy, nx * ny, "pxy");
  const double s = std::accumulate(pxy.begin(), pxy.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-12) throw InputError("pxy must sum to 1");
  if (rounds < 1) throw InputError("rounds must be >= 1");
  auto check_fn = [&](const std::vector<std::size_t>& f, std::size_t nz,
                      const char* field) {
    if (f.size() != nx * ny) {
      throw InputError(std::string(field) + " must have |X||Y| entries");
    }
    for (std::size_t z : f) {
      if (z >= nz) throw InputError(std::string(field) + " value out of range");
    }
  };
  check_fn(f_a, nz_a, "f_a");
  check_fn(f_b, nz_b, "f_b");
  check_table_size(d_a, nz_a * nz_a, "d_a");
  check_table_size(d_b, nz_b * nz_b, "d_b");
  check_table_size(d_ab, nz_a * nz_a, "d_ab");
  check_table_size(d_ba, nz_b * nz_b, "d_ba");
  for (std::size_t z = 0; z < nz_a; ++z) {
    if (d_ab[z * nz_a + z] != 0.0) throw InputError("d_ab(z, z) must be 0");
  }
  for (std::size_t z = 0; z < nz_b; ++z) {
    if (d_ba[z * nz_b + z] != 0.0) throw InputError("d_ba(z, z) must be 0");
  }
  check_target(targets.d_a, "d_a");
  check_target(targets.d_b, "d_b");
  check_target(targets.d_ab, "d_ab");
  check_target(targets.d_ba, "d_ba");
}

std::vector<double> hamming_table(std::size_t n) {
  std::vector<double> t(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 0.0;
  return t;
}

std::vector<std::size_t> cardinality_caps(const DiscreteProblem& p,
                                          const AuxSizes& sizes) {
  const std::size_t t = static_cast<std::size_t>(p.rounds);
  std::vector<std::size_t> caps(t);
  std::size_t prev = 1;
  for (std::size_t j = 1; j <= t; ++j) {
    const bool odd = j % 2 == 1;
    const std::size_t base = odd ? p.nx * sizes.w_a : p.ny * sizes.w_b;
    caps[j - 1] = base * prev + t - j + 5;
    if (j - 1 < sizes.u.size()) prev *= sizes.u[j - 1];
  }
  return caps;
}

void validate_sizes(const DiscreteProblem& p, const AuxSizes& sizes) {
  if (sizes.w_a < 1 || sizes.w_a > 2) throw InputError("|W_A| must be 1 or 2");
  if (sizes.w_b < 1 || sizes.w_b > 2) throw InputError("|W_B| must be 1 or 2");
  if (sizes.u.size() != static_cast<std::size_t>(p.rounds)) {
    throw InputError("need one auxiliary alphabet size per round");
  }
  const auto caps = cardinality_caps(p, sizes);
  for (std::size_t j = 0; j < sizes.u.size(); ++j) {
    if (sizes.u[j] < 1) throw InputError("auxiliary alphabet sizes must be >= 1");
    if (sizes.u[j] > caps[j]) {
      throw InputError("|U_" + std::to_string(j + 1) + "| = " +
                       std::to_string(sizes.u[j]) + " exceeds its cap " +
                       std::to_string(caps[j]));
    }
  }
}

AuxSizes default_sizes(const DiscreteProblem& p, DecoderMode mode) {
  AuxSizes s;
  s.w_a = s.w_b = mode == DecoderMode::kConstrained ? 2 : 1;
  for (int j = 0; j < p.rounds; ++j) {
    s.u.push_back(3);
    const auto caps = cardinality_caps(p, s);
    s.u.back() = std::min<std::size_t>(caps[j], 3);
  }
  return s;
}

bool under_cap(const DiscreteProblem& p, const AuxSizes& sizes,
               DecoderMode mode) {
  if (mode == DecoderMode::kConstrained && (sizes.w_a < 2 || sizes.w_b < 2)) {
    return true;
  }
  const auto caps = cardinality_caps(p, sizes);
  for (std::size_t j = 0; j < sizes.u.size(); ++j) {
    if (sizes.u[j] < caps[j]) return true;
  }
  return false;
}

std::size_t round_row_count(const DiscreteProblem& p, const AuxSizes& s,
                            std::size_t round) {
  const bool odd = round % 2 == 0;  // 0-based index of a 1-based odd round
  const std::size_t base = odd ? p.nx * s.w_a : p.ny * s.w_b;
  return base * product(s.u, round);
}

void AuxChain::validate(const DiscreteProblem& p) const {
  validate_sizes(p, sizes);
  check_rows(w_a_channel, p.nx, sizes.w_a, "w_a_channel");
  check_rows(w_b_channel, p.ny, sizes.w_b, "w_b_channel");
  if (round_channels.size() != sizes.u.size()) {
    throw InputError("need one round channel per round");
  }
  for (std::size_t j = 0; j < round_channels.size(); ++j) {
    check_rows(round_channels[j], round_row_count(p, sizes, j), sizes.u[j],
               "round_channels[" + std::to_string(j) + "]");
  }
}

AuxChain constant_chain(const DiscreteProblem& p, const AuxSizes& sizes) {
  validate_sizes(p, sizes);
  auto point_mass = [](std::size_t rows, std::size_t m) {
    std::vector<double> ch(rows * m, 0.0);
    for (std::size_t r = 0; r < rows; ++r) ch[r * m] = 1.0;
    return ch;
  };
  AuxChain c;
  c.sizes = sizes;
  c.w_a_channel = point_mass(p.nx, sizes.w_a);
  c.w_b_channel = point_mass(p.ny, sizes.w_b);
  for (std::size_t j = 0; j < sizes.u.size(); ++j) {
    c.round_channels.push_back(
        point_mass(round_row_count(p, sizes, j), sizes.u[j]));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Joint pmf and rates

namespace {

void fill_joint(const DiscreteProblem& p, const AuxChain& c,
                std::vector<double>& out, std::vector<double>& prefix,
                std::vector<double>& next) {
  const AuxSizes& s = c.sizes;
  const std::size_t t = s.u.size();
  const std::size_t nu = product(s.u, t);
  out.assign(p.nx * p.ny * s.w_a * s.w_b * nu, 0.0);
  std::size_t cell = 0;
  for (std::size_t x = 0; x < p.nx; ++x) {
    for (std::size_t y = 0; y < p.ny; ++y) {
      for (std::size_t a = 0; a < s.w_a; ++a) {
        for (std::size_t b = 0; b < s.w_b; ++b, ++cell) {
          const double base = p.pxy_at(x, y) * c.w_a_channel[x * s.w_a + a] *
                              c.w_b_channel[y * s.w_b + b];
          if (base == 0.0) continue;
          // Extend the u-prefix one round at a time.
          prefix.assign(1, base);
          std::size_t width = 1;
          for (std::size_t j = 0; j < t; ++j) {
            const bool odd = j % 2 == 0;
            const std::size_t src = odd ? x * s.w_a + a : y * s.w_b + b;
            const std::size_t m = s.u[j];
            const std::vector<double>& ch = c.round_channels[j];
            next.assign(width * m, 0.0);
            for (std::size_t k = 0; k < width; ++k) {
              if (prefix[k] == 0.0) continue;
              const double* row = &ch[(src * width + k) * m];
              for (std::size_t u = 0; u < m; ++u) {
                next[k * m + u] = prefix[k] * row[u];
              }
            }
            prefix.swap(next);
            width *= m;
          }
          std::copy(prefix.begin(), prefix.end(), out.begin() + cell * nu);
        }
      }
    }
  }
}

std::vector<std::size_t> joint_dims(const DiscreteProblem& p,
                                    const AuxSizes& s) {
  std::vector<std::size_t> dims{p.nx, p.ny, s.w_a, s.w_b};
  dims.insert(dims.end(), s.u.begin(), s.u.end());
  return dims;
}

AxisMask prefix_mask(std::size_t j) {
  AxisMask m = 0;
  for (std::size_t i = 0; i < j; ++i) m |= axis_bit(kAxisU1 + i);
  return m;
}

}  // namespace

JointPmf build_joint(const DiscreteProblem& p, const AuxChain& chain) {
  p.validate();
  chain.validate(p);
  std::vector<double> out, prefix, next;
  fill_joint(p, chain, out, prefix, next);
  return JointPmf(joint_dims(p, chain.sizes), std::move(out));
}

std::vector<double> round_rates(const JointPmf& joint) {
  if (joint.rank() < kAxisU1) throw InputError("joint lacks auxiliary axes");
  const std::size_t t = joint.rank() - kAxisU1;
  std::vector<double> r(t);
  const AxisMask x = axis_bit(kAxisX), y = axis_bit(kAxisY);
  for (std::size_t j = 0; j < t; ++j) {
    const AxisMask uj = axis_bit(kAxisU1 + j);
    const AxisMask prev = prefix_mask(j);
    const bool odd = j % 2 == 0;
    r[j] = odd ? joint.cond_mutual_info(x, uj, y | prev)
               : joint.cond_mutual_info(y, uj, x | prev);
  }
  return r;
}

double markov_residual(const JointPmf& joint) {
  const std::size_t t = joint.rank() - kAxisU1;
  const AxisMask x = axis_bit(kAxisX), y = axis_bit(kAxisY);
  const AxisMask wa = axis_bit(kAxisWA), wb = axis_bit(kAxisWB);
  double r = std::max(joint.cond_mutual_info(wa, y | wb, x),
                      joint.cond_mutual_info(wb, x | wa, y));
  for (std::size_t j = 0; j < t; ++j) {
    const AxisMask uj = axis_bit(kAxisU1 + j);
    const AxisMask prev = prefix_mask(j);
    const bool odd = j % 2 == 0;
    r = std::max(r, odd ? joint.cond_mutual_info(uj, y, x | wa | prev)
                        : joint.cond_mutual_info(uj, x, y | wb | prev));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decoders

Distortions4 evaluate_decoders(const DiscreteProblem& p, const JointPmf& joint,
                               const DecoderTables& tb) {
  const Layout L(joint);
  const bool common = tb.mode == DecoderMode::kCommon;
  Distortions4 d{0.0, 0.0, 0.0, 0.0};
  L.for_each(joint.values(), [&](double pr, std::size_t x, std::size_t y,
                                 std::size_t u, std::size_t ca,
                                 std::size_t cb) {
    if (pr == 0.0) return;
    const std::size_t ia = common ? u : ca;
    const std::size_t ib = common ? u : cb;
    const std::size_t za = tb.z_a[ia], wb = tb.w_b[ib];
    const std::size_t zb = tb.z_b[ib], wa = tb.w_a[ia];
    d.d_a += pr * p.d_a[p.f_a[x * p.ny + y] * p.nz_a + za];
    d.d_ab += pr * p.d_ab[za * p.nz_a + wb];
    d.d_b += pr * p.d_b[p.f_b[x * p.ny + y] * p.nz_b + zb];
    d.d_ba += pr * p.d_ba[zb * p.nz_b + wa];
  });
  return d;
}

bool meets_targets(const Distortions4& a, const DistortionTargets& t,
                   double tol) {
  return a.d_a <= t.d_a + tol && a.d_b <= t.d_b + tol &&
         a.d_ab <= t.d_ab + tol && a.d_ba <= t.d_ba + tol;
}

namespace {

// Shared-table decoder for one function: argmin_z E[d(f(X,Y), z) | u].
std::vector<std::size_t> common_table(const DiscreteProblem& p,
                                      const JointPmf& joint,
                                      const std::vector<std::size_t>& f,
                                      const std::vector<double>& dist,
                                      std::size_t nz) {
  const Layout L(joint);
  std::vector<double> cost(L.nu * nz, 0.0), mass(L.nu, 0.0);
  L.for_each(joint.values(), [&](double pr, std::size_t x, std::size_t y,
                                 std::size_t u, std::size_t, std::size_t) {
    if (pr == 0.0) return;
    mass[u] += pr;
    const std::size_t z = f[x * p.ny + y];
    for (std::size_t zh = 0; zh < nz; ++zh) cost[u * nz + zh] += pr * dist[z * nz + zh];
  });
  std::vector<std::size_t> table(L.nu, 0);
  for (std::size_t u = 0; u < L.nu; ++u) {
    if (mass[u] > 0.0) table[u] = argmin_row(&cost[u * nz], nz);
  }
  return table;
}

// Sequential candidate for the pair (Zhat at `own` side, What at the other).
PairTables sequential_pair(const DiscreteProblem& p, const JointPmf& joint,
                           bool pair_a) {
  const Layout L(joint);
  const std::size_t nz = pair_a ? p.nz_a : p.nz_b;
  const auto& f = pair_a ? p.f_a : p.f_b;
  const auto& dist = pair_a ? p.d_a : p.d_b;
  const auto& drec = pair_a ? p.d_ab : p.d_ba;
  const std::size_t n_own = pair_a ? L.cells_a() : L.cells_b();
  const std::size_t n_other = pair_a ? L.cells_b() : L.cells_a();

  std::vector<double> cost(n_own * nz, 0.0), mass(n_own, 0.0);
  L.for_each(joint.values(), [&](double pr, std::size_t x, std::size_t y,
                                 std::size_t, std::size_t ca, std::size_t cb) {
    if (pr == 0.0) return;
    const std::size_t c = pair_a ? ca : cb;
    mass[c] += pr;
    const std::size_t z = f[x * p.ny + y];
    for (std::size_t zh = 0; zh < nz; ++zh) cost[c * nz + zh] += pr * dist[z * nz + zh];
  });
  PairTables t;
  t.own.assign(n_own, 0);
  for (std::size_t c = 0; c < n_own; ++c) {
    if (mass[c] > 0.0) t.own[c] = argmin_row(&cost[c * nz], nz);
  }

  std::vector<double> cost2(n_other * nz, 0.0), mass2(n_other, 0.0);
  L.for_each(joint.values(), [&](double pr, std::size_t, std::size_t,
                                 std::size_t, std::size_t ca, std::size_t cb) {
    if (pr == 0.0) return;
    const std::size_t own = pair_a ? ca : cb;
    const std::size_t other = pair_a ? cb : ca;
    mass2[other] += pr;
    const std::size_t zh = t.own[own];
    for (std::size_t w = 0; w < nz; ++w) cost2[other * nz + w] += pr * drec[zh * nz + w];
  });
  t.other.assign(n_other, 0);
  for (std::size_t c = 0; c < n_other; ++c) {
    if (mass2[c] > 0.0) t.other[c] = argmin_row(&cost2[c * nz], nz);
  }
  return t;
}

// Agreement candidate: both terminals output one value per connected
// component of the bipartite graph {A-cell -- B-cell : p > 0}. Both sides
// can identify the component from their own observation and u^t.
PairTables agreement_pair(const DiscreteProblem& p, const JointPmf& joint,
                          bool pair_a) {
  const Layout L(joint);
  const std::size_t na = L.cells_a(), nb = L.cells_b();
  DisjointSet ds(na + nb);
  L.for_each(joint.values(), [&](double pr, std::size_t, std::size_t,
                                 std::size_t, std::size_t ca, std::size_t cb) {
    if (pr > 0.0) ds.unite(ca, na + cb);
  });

  const std::size_t nz = pair_a ? p.nz_a : p.nz_b;
  const auto& f = pair_a ? p.f_a : p.f_b;
  const auto& dist = pair_a ? p.d_a : p.d_b;
  std::vector<double> cost((na + nb) * nz, 0.0), mass(na + nb, 0.0);
  L.for_each(joint.values(), [&](double pr, std::size_t x, std::size_t y,
                                 std::size_t, std::size_t ca, std::size_t) {
    if (pr == 0.0) return;
    const std::size_t root = ds.find(ca);
    mass[root] += pr;
    const std::size_t z = f[x * p.ny + y];
    for (std::size_t zh = 0; zh < nz; ++zh) cost[root * nz + zh] += pr * dist[z * nz + zh];
  });
  auto value_of = [&](std::size_t node) -> std::size_t {
    const std::size_t root = ds.find(node);
    return mass[root] > 0.0 ? argmin_row(&cost[root * nz], nz) : 0;
  };
  std::vector<std::size_t> za(na), zb(nb);
  for (std::size_t c = 0; c < na; ++c) za[c] = value_of(c);
  for (std::size_t c = 0; c < nb; ++c) zb[c] = value_of(na + c);
  return pair_a ? PairTables{za, zb} : PairTables{zb, za};
}

}  // namespace

DecoderResult optimal_decoders(const DiscreteProblem& p, const JointPmf& joint,
                               DecoderMode mode) {
  DecoderResult r;
  r.tables.mode = mode;
  if (mode == DecoderMode::kCommon) {
    r.tables.z_a = common_table(p, joint, p.f_a, p.d_a, p.nz_a);
    r.tables.z_b = common_table(p, joint, p.f_b, p.d_b, p.nz_b);
    r.tables.w_b = r.tables.z_a;
    r.tables.w_a = r.tables.z_b;
    r.distortions = evaluate_decoders(p, joint, r.tables);
    return r;
  }

  const PairTables seq_a = sequential_pair(p, joint, true);
  const PairTables seq_b = sequential_pair(p, joint, false);
  r.tables.z_a = seq_a.own;
  r.tables.w_b = seq_a.other;
  r.tables.z_b = seq_b.own;
  r.tables.w_a = seq_b.other;
  r.distortions = evaluate_decoders(p, joint, r.tables);

  const bool a_ok = r.distortions.d_a <= p.targets.d_a + 1e-12 &&
                    r.distortions.d_ab <= p.targets.d_ab + 1e-12;
  const bool b_ok = r.distortions.d_b <= p.targets.d_b + 1e-12 &&
                    r.distortions.d_ba <= p.targets.d_ba + 1e-12;
  if (a_ok && b_ok) return r;

  DecoderTables alt = r.tables;
  if (!a_ok) {
    const PairTables agr = agreement_pair(p, joint, true);
    alt.z_a = agr.own;
    alt.w_b = agr.other;
  }
  if (!b_ok) {
    const PairTables agr = agreement_pair(p, joint, false);
    alt.z_b = agr.own;
    alt.w_a = agr.other;
  }
  const Distortions4 alt_d = evaluate_decoders(p, joint, alt);
  const bool alt_a_ok = alt_d.d_a <= p.targets.d_a + 1e-12 &&
                        alt_d.d_ab <= p.targets.d_ab + 1e-12;
  const bool alt_b_ok = alt_d.d_b <= p.targets.d_b + 1e-12 &&
                        alt_d.d_ba <= p.targets.d_ba + 1e-12;
  // Keep each pair's sequential tables unless the agreement tables fix it.
  if (!a_ok && alt_a_ok) {
    r.tables.z_a = alt.z_a;
    r.tables.w_b = alt.w_b;
  }
  if (!b_ok && alt_b_ok) {
    r.tables.z_b = alt.z_b;
    r.tables.w_a = alt.w_a;
  }
  r.distortions = evaluate_decoders(p, joint, r.tables);
  return r;
}

// ---------------------------------------------------------------------------
// Exhaustive search

std::vector<std::vector<double>> simplex_grid(std::size_t m, std::size_t q) {
  if (m == 0 || q == 0) throw InputError("simplex grid needs m >= 1, q >= 1");
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> cur(m, 0);
  // Recursive fill: entry i takes values from remaining down to 0.
  auto rec = [&](auto&& self, std::size_t i, std::size_t remaining) -> void {
    if (i == m - 1) {
      cur[i] = remaining;
      comps.push_back(cur);
      return;
    }
    for (std::size_t k = remaining + 1; k-- > 0;) {
      cur[i] = k;
      self(self, i + 1, remaining - k);
    }
  };
  rec(rec, 0, q);
  std::vector<std::vector<double>> out;
  out.reserve(comps.size());
  for (const auto& c : comps) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = static_cast<double>(c[i]) / static_cast<double>(q);
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// One conditional-pmf row of the chain; rows are ordered W_A rows, W_B rows,
// then each round's rows. The first row is the most significant digit.
struct RowSpec {
  int channel;  // -2 = W_A, -1 = W_B, j >= 0 = round j
  std::size_t offset;
  std::size_t m;
};

std::vector<RowSpec> row_specs(const DiscreteProblem& p, const AuxSizes& s) {
  std::vector<RowSpec> rows;
  for (std::size_t x = 0; x < p.nx; ++x) rows.push_back({-2, x * s.w_a, s.w_a});
  for (std::size_t y = 0; y < p.ny; ++y) rows.push_back({-1, y * s.w_b, s.w_b});
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    const std::size_t n = round_row_count(p, s, j);
    for (std::size_t r = 0; r < n; ++r) {
      rows.push_back({static_cast<int>(j), r * s.u[j], s.u[j]});
    }
  }
  return rows;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

class ChainOdometer {
 public:
  ChainOdometer(const DiscreteProblem& p, const AuxSizes& s, std::size_t q)
      : rows_(row_specs(p, s)) {
    for (const RowSpec& r : rows_) {
      std::size_t m = r.m;
      if (grids_.size() <= m) grids_.resize(m + 1);
      if (grids_[m].empty()) grids_[m] = simplex_grid(m, q);
    }
    chain_ = constant_chain(p, s);
    digits_.assign(rows_.size(), 0);
  }

  void seek(std::uint64_t index) {
    for (std::size_t r = rows_.size(); r-- > 0;) {
      const std::uint64_t radix = grids_[rows_[r].m].size();
      digits_[r] = static_cast<std::size_t>(index % radix);
      index /= radix;
      write_row(r);
    }
  }

  void advance() {
    for (std::size_t r = rows_.size(); r-- > 0;) {
      const std::size_t radix = grids_[rows_[r].m].size();
      if (++digits_[r] < radix) {
        write_row(r);
        return;
      }
      digits_[r] = 0;
      write_row(r);
    }
  }

  const AuxChain& chain() const { return chain_; }

 private:
  void write_row(std::size_t r) {
    const RowSpec& spec = rows_[r];
    std::vector<double>& ch =
        spec.channel == -2   ? chain_.w_a_channel
        : spec.channel == -1 ? chain_.w_b_channel
                             : chain_.round_channels[spec.channel];
    const auto& v = grids_[spec.m][digits_[r]];
    std::copy(v.begin(), v.end(), ch.begin() + spec.offset);
  }

  std::vector<RowSpec> rows_;
  std::vector<std::vector<std::vector<double>>> grids_;
  std::vector<std::size_t> digits_;
  AuxChain chain_;
};

struct WorkerBest {
  bool found = false;
  double objective = std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  AuxChain chain;
  std::vector<double> rates;
  DecoderResult decoders;
};

}  // namespace

std::uint64_t search_space_size(const DiscreteProblem& p,
                                const AuxSizes& sizes, std::size_t q) {
  std::uint64_t total = 1;
  std::vector<std::uint64_t> count_by_m;
  for (const RowSpec& r : row_specs(p, sizes)) {
    // Number of compositions of q into m parts: C(q + m - 1, m - 1).
    std::uint64_t c = 1;
    for (std::size_t i = 1; i < r.m; ++i) {
      c = c * (q + i) / i;
    }
    total = saturating_mul(total, c);
  }
  return total;
}

void for_each_chain(
    const DiscreteProblem& p, const AuxSizes& sizes, std::size_t q,
    const std::function<void(std::uint64_t, const AuxChain&)>& visit) {
  validate_sizes(p, sizes);
  const std::uint64_t n = search_space_size(p, sizes, q);
  ChainOdometer odo(p, sizes, q);
  odo.seek(0);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i > 0) odo.advance();
    visit(i, odo.chain());
  }
}

SearchResult min_rates_search(const DiscreteProblem& p,
                              const SearchOptions& opt) {
  p.validate();
  if (opt.q < 1) throw InputError("q must be >= 1");
  validate_sizes(p, opt.sizes);
  std::vector<double> weights = opt.weights;
  if (weights.empty()) weights.assign(p.rounds, 1.0);
  if (weights.size() != static_cast<std::size_t>(p.rounds)) {
    throw InputError("weights must have one entry per round");
  }
  for (double w : weights) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      throw InputError("weights must be finite and nonnegative");
    }
  }

  const std::uint64_t n = search_space_size(p, opt.sizes, opt.q);
  if (n > opt.budget) {
    throw InputError("search space of " +
                     (n == std::numeric_limits<std::uint64_t>::max()
                          ? std::string("more than 2^64")
                          : std::to_string(n)) +
                     " chains exceeds the budget of " +
                     std::to_string(opt.budget));
  }

  unsigned threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  if (n < 4096) threads = 1;
  std::vector<WorkerBest> best(threads);

  auto work = [&](unsigned w) {
    const std::uint64_t begin = n * w / threads;
    const std::uint64_t end = n * (w + 1) / threads;
    if (begin >= end) return;
    ChainOdometer odo(p, opt.sizes, opt.q);
    odo.seek(begin);
    std::vector<double> buf, prefix, next;
    JointPmf joint(joint_dims(p, opt.sizes),
                   std::vector<double>(
                       p.nx * p.ny * opt.sizes.w_a * opt.sizes.w_b *
                       product(opt.sizes.u, opt.sizes.u.size())));
    WorkerBest& b = best[w];
    for (std::uint64_t i = begin; i < end; ++i) {
      if (i > begin) odo.advance();
      fill_joint(p, odo.chain(), joint.mutable_values(), prefix, next);
      const std::vector<double> rates = round_rates(joint);
      double obj = 0.0;
      for (std::size_t j = 0; j < rates.size(); ++j) obj += weights[j] * rates[j];
      if (b.found && !(obj < b.objective)) continue;
      DecoderResult dec = optimal_decoders(p, joint, opt.mode);
      if (!meets_targets(dec.distortions, p.targets, opt.feasibility_tol)) continue;
      b.found = true;
      b.objective = obj;
      b.index = i;
      b.chain = odo.chain();
      b.rates = rates;
      b.decoders = std::move(dec);
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  const WorkerBest* winner = nullptr;
  for (const WorkerBest& b : best) {
    if (!b.found) continue;
    if (!winner || b.objective < winner->objective ||
        (b.objective == winner->objective && b.index < winner->index)) {
      winner = &b;
    }
  }
  if (!winner) {
    throw InfeasibleError("no auxiliary chain on the q = " +
                          std::to_string(opt.q) +
                          " grid meets the distortion targets");
  }

  SearchResult r;
  r.point.rates = winner->rates;
  r.point.distortions = winner->decoders.distortions;
  r.objective = winner->objective;
  r.chain = winner->chain;
  r.decoders = winner->decoders.tables;
  r.chain_index = winner->index;
  r.chains_evaluated = n;
  r.inner_bound = under_cap(p, opt.sizes, opt.mode);
  r.caps = cardinality_caps(p, opt.sizes);
  return r;
}

}  // namespace ircr
