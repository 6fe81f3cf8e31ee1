#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ircr/discrete_io.hpp"
#include "ircr/region_discrete.hpp"

using namespace ircr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

DiscreteProblem bsc(double crossover) {
  DiscreteProblem p;
  p.pxy = {(1 - crossover) / 2, crossover / 2, crossover / 2, (1 - crossover) / 2};
  p.rounds = 1;
  p.f_a = {0, 0, 0, 0};
  p.f_b = {0, 0, 1, 1};  // f_B = x
  p.d_a = p.d_b = p.d_ab = p.d_ba = hamming_table(2);
  p.targets = {kInf, 0.0, kInf, kInf};
  return p;
}

DiscreteProblem asymmetric(int rounds) {
  DiscreteProblem p;
  p.pxy = {0.4, 0.1, 0.15, 0.35};
  p.rounds = rounds;
  p.f_a = {0, 1, 1, 0};  // x xor y
  p.f_b = {0, 0, 1, 1};  // x
  p.d_a = p.d_b = p.d_ab = p.d_ba = hamming_table(2);
  p.targets = {kInf, kInf, kInf, kInf};
  return p;
}

// Random chain with generic (non-grid) rows.
AuxChain random_chain(const DiscreteProblem& p, const AuxSizes& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  auto fill = [&](std::vector<double>& ch, std::size_t m) {
    for (std::size_t r = 0; r * m < ch.size(); ++r) {
      double sum = 0;
      for (std::size_t i = 0; i < m; ++i) sum += (ch[r * m + i] = u(rng));
      for (std::size_t i = 0; i < m; ++i) ch[r * m + i] /= sum;
    }
  };
  AuxChain c = constant_chain(p, s);
  fill(c.w_a_channel, s.w_a);
  fill(c.w_b_channel, s.w_b);
  for (std::size_t j = 0; j < s.u.size(); ++j) fill(c.round_channels[j], s.u[j]);
  return c;
}

AuxSizes sizes(std::size_t w, std::vector<std::size_t> u) {
  AuxSizes s;
  s.w_a = s.w_b = w;
  s.u = std::move(u);
  return s;
}

// Expected distortion of a decoder table given as a function of the joint
// index, computed straight from the joint tensor.
template <typename Decode>
double table_distortion(const DiscreteProblem& p, const JointPmf& j, Decode&& decode,
                        const std::vector<std::size_t>& f, const std::vector<double>& d,
                        std::size_t nz) {
  const auto& dims = j.dims();
  const std::size_t nu = j.size() / (dims[0] * dims[1] * dims[2] * dims[3]);
  double total = 0;
  std::size_t i = 0;
  for (std::size_t x = 0; x < dims[0]; ++x)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t a = 0; a < dims[2]; ++a)
        for (std::size_t b = 0; b < dims[3]; ++b)
          for (std::size_t u = 0; u < nu; ++u, ++i) {
            total += j.values()[i] * d[f[x * p.ny + y] * nz + decode(x, y, a, b, u)];
          }
  return total;
}

}  // namespace

TEST(BuildJoint, ConstantChannelsAndMarginals) {
  const DiscreteProblem p = bsc(0.11);
  const AuxChain c = constant_chain(p, sizes(2, {3}));
  const JointPmf j = build_joint(p, c);
  EXPECT_NEAR(j.total(), 1.0, 1e-12);
  const JointPmf m = j.marginal(axis_bit(kAxisX) | axis_bit(kAxisY));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m.values()[i], p.pxy[i]);
  // All mass on auxiliary symbol 0.
  const JointPmf w = j.marginal(axis_bit(kAxisWA) | axis_bit(kAxisU1));
  EXPECT_NEAR(w.values()[0], 1.0, 1e-15);
  for (double r : round_rates(j)) EXPECT_EQ(r, 0.0);
}

TEST(BuildJoint, CopyChannelRateIsConditionalEntropy) {
  const DiscreteProblem p = bsc(0.11);
  AuxChain c = constant_chain(p, sizes(1, {2}));
  c.round_channels[0] = {1, 0, 0, 1};
  const JointPmf j = build_joint(p, c);
  EXPECT_NEAR(round_rates(j)[0], h2(0.11), 1e-12);
  EXPECT_NEAR(h2(0.11), 0.4999, 1e-4);
}

TEST(BuildJoint, MarkovResidualsVanishOnRandomChains) {
  std::mt19937_64 rng(1);
  for (int rounds : {1, 2, 3}) {
    DiscreteProblem p = asymmetric(rounds);
    std::vector<std::size_t> u(rounds, 2);
    for (int i = 0; i < 10; ++i) {
      const JointPmf j = build_joint(p, random_chain(p, sizes(2, u), rng));
      EXPECT_NEAR(j.total(), 1.0, 1e-9);
      EXPECT_LT(markov_residual(j), 1e-9);
      const JointPmf m = j.marginal(axis_bit(kAxisX) | axis_bit(kAxisY));
      for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(m.values()[k], p.pxy[k], 1e-15);
    }
  }
}

TEST(BuildJoint, RejectsCapViolationsAndBadRows) {
  const DiscreteProblem p = bsc(0.11);
  const auto caps = cardinality_caps(p, sizes(1, {1}));
  ASSERT_EQ(caps.size(), 1u);
  EXPECT_EQ(caps[0], 2u * 1 + 1 - 1 + 5);
  EXPECT_THROW(constant_chain(p, sizes(1, {caps[0] + 1})), InputError);
  EXPECT_THROW(constant_chain(p, sizes(3, {2})), InputError);
  AuxChain c = constant_chain(p, sizes(1, {2}));
  c.round_channels[0] = {0.5, 0.6, 1, 0};
  EXPECT_THROW(build_joint(p, c), InputError);
}

TEST(RoundRates, PermutationInvariance) {
  std::mt19937_64 rng(2);
  const DiscreteProblem p = asymmetric(2);
  const AuxSizes s = sizes(1, {3, 2});
  const AuxChain c = random_chain(p, s, rng);
  const auto base = round_rates(build_joint(p, c));

  // Relabel U1 by the cycle 0 -> 1 -> 2 -> 0: permute round-1 columns and the
  // round-2 rows indexed by u1.
  const std::size_t perm[3] = {1, 2, 0};
  AuxChain q = c;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t u = 0; u < 3; ++u)
      q.round_channels[0][x * 3 + perm[u]] = c.round_channels[0][x * 3 + u];
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t u = 0; u < 3; ++u)
      for (std::size_t v = 0; v < 2; ++v)
        q.round_channels[1][(y * 3 + perm[u]) * 2 + v] = c.round_channels[1][(y * 3 + u) * 2 + v];
  const auto permuted = round_rates(build_joint(p, q));
  EXPECT_NEAR(base[0] + base[1], permuted[0] + permuted[1], 1e-12);
}

TEST(RoundRates, DeterministicFunctionOfEarlierRoundCarriesNothing) {
  std::mt19937_64 rng(3);
  const DiscreteProblem p = asymmetric(2);
  AuxChain c = random_chain(p, sizes(1, {2, 2}), rng);
  // U2 = U1 regardless of y.
  c.round_channels[1] = {1, 0, 0, 1, 1, 0, 0, 1};
  EXPECT_NEAR(round_rates(build_joint(p, c))[1], 0.0, 1e-12);
}

TEST(Decoders, CommonModeRecoversXExactly) {
  const DiscreteProblem p = bsc(0.11);
  AuxChain c = constant_chain(p, sizes(1, {2}));
  c.round_channels[0] = {1, 0, 0, 1};
  const DecoderResult r = optimal_decoders(p, build_joint(p, c), DecoderMode::kCommon);
  EXPECT_EQ(r.distortions.d_b, 0.0);
  EXPECT_EQ(r.distortions.d_ab, 0.0);
  EXPECT_EQ(r.distortions.d_ba, 0.0);
}

// Exhaustive enumeration of every decoder table as an oracle.
TEST(Decoders, MatchExhaustiveEnumeration) {
  std::mt19937_64 rng(4);
  for (double crossover : {0.05, 0.2, 0.35}) {
    DiscreteProblem p = bsc(crossover);
    p.f_a = {0, 1, 1, 0};
    for (int trial = 0; trial < 5; ++trial) {
      const AuxSizes s = sizes(1, {3});
      const JointPmf j = build_joint(p, random_chain(p, s, rng));

      // Common mode: tables u -> z.
      double best_b = kInf, best_a = kInf;
      for (unsigned t = 0; t < 8; ++t) {
        auto dec = [&](std::size_t, std::size_t, std::size_t, std::size_t, std::size_t u) {
          return static_cast<std::size_t>((t >> u) & 1);
        };
        best_b = std::min(best_b, table_distortion(p, j, dec, p.f_b, p.d_b, 2));
        best_a = std::min(best_a, table_distortion(p, j, dec, p.f_a, p.d_a, 2));
      }
      const DecoderResult common = optimal_decoders(p, j, DecoderMode::kCommon);
      EXPECT_NEAR(common.distortions.d_b, best_b, 1e-12);
      EXPECT_NEAR(common.distortions.d_a, best_a, 1e-12);

      // Constrained mode with a vacuous reconstruction metric: per-terminal
      // tables (x, u) -> z at A and (y, u) -> z at B.
      DiscreteProblem free = p;
      free.d_ab = free.d_ba = {0, 0, 0, 0};
      double cb = kInf, ca = kInf;
      for (unsigned t = 0; t < 64; ++t) {
        auto dec_b = [&](std::size_t, std::size_t y, std::size_t, std::size_t, std::size_t u) {
          return static_cast<std::size_t>((t >> (y * 3 + u)) & 1);
        };
        auto dec_a = [&](std::size_t x, std::size_t, std::size_t, std::size_t, std::size_t u) {
          return static_cast<std::size_t>((t >> (x * 3 + u)) & 1);
        };
        cb = std::min(cb, table_distortion(free, j, dec_b, free.f_b, free.d_b, 2));
        ca = std::min(ca, table_distortion(free, j, dec_a, free.f_a, free.d_a, 2));
      }
      const DecoderResult con = optimal_decoders(free, j, DecoderMode::kConstrained);
      EXPECT_NEAR(con.distortions.d_b, cb, 1e-12);
      EXPECT_NEAR(con.distortions.d_a, ca, 1e-12);
      EXPECT_EQ(con.distortions.d_ab, 0.0);
    }
  }
}

// With a common-reconstruction target (d_AB = 0) the constrained decoders
// reach the smallest D_A over all table pairs (Zhat_A(x, u), What_B(y, u))
// with zero reconstruction distortion.
TEST(Decoders, ConstrainedMatchesEnumerationUnderAgreement) {
  std::mt19937_64 rng(5);
  DiscreteProblem p = asymmetric(1);
  p.targets = {kInf, kInf, 0.0, kInf};
  for (int trial = 0; trial < 10; ++trial) {
    const AuxSizes s = sizes(1, {2});
    AuxChain c = random_chain(p, s, rng);
    if (trial % 2 == 0) c.round_channels[0] = {1, 0, 0.3, 0.7};  // some zero entries
    const JointPmf j = build_joint(p, c);
    double best = kInf;
    for (unsigned ta = 0; ta < 16; ++ta) {
      for (unsigned tb = 0; tb < 16; ++tb) {
        auto za = [&](std::size_t x, std::size_t, std::size_t, std::size_t, std::size_t u) {
          return static_cast<std::size_t>((ta >> (x * 2 + u)) & 1);
        };
        // d_AB(Zhat_A, What_B) as a distortion with "function" Zhat_A.
        double dab = 0;
        std::size_t i = 0;
        for (std::size_t x = 0; x < 2; ++x)
          for (std::size_t y = 0; y < 2; ++y)
            for (std::size_t u = 0; u < 2; ++u, ++i) {
              const std::size_t a = (ta >> (x * 2 + u)) & 1, b = (tb >> (y * 2 + u)) & 1;
              dab += j.values()[i] * p.d_ab[a * 2 + b];
            }
        if (dab > 1e-12) continue;
        best = std::min(best, table_distortion(p, j, za, p.f_a, p.d_a, 2));
      }
    }
    p.targets.d_a = best;
    const DecoderResult r = optimal_decoders(p, j, DecoderMode::kConstrained);
    EXPECT_LE(r.distortions.d_ab, 1e-12) << trial;
    EXPECT_NEAR(r.distortions.d_a, best, 1e-12) << trial;
    p.targets.d_a = kInf;
  }
}

TEST(SimplexGrid, CompositionsInOrder) {
  const auto g = simplex_grid(3, 2);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g.front(), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(g[1], (std::vector<double>{0.5, 0.5, 0}));
  EXPECT_EQ(g.back(), (std::vector<double>{0, 0, 1}));
  for (const auto& v : g) EXPECT_NEAR(v[0] + v[1] + v[2], 1.0, 1e-15);
  EXPECT_EQ(simplex_grid(1, 5).size(), 1u);
}

TEST(Search, SpaceSizeAndBudget) {
  const DiscreteProblem p = bsc(0.11);
  // Rows: 2 (W_A, size 1), 2 (W_B, size 1), 2 (U1, size 3): C(6, 2)^2 at q = 4.
  EXPECT_EQ(search_space_size(p, sizes(1, {3}), 4), 225u);
  std::uint64_t visited = 0;
  for_each_chain(p, sizes(1, {2}), 2, [&](std::uint64_t i, const AuxChain& c) {
    EXPECT_EQ(i, visited++);
    c.validate(p);
  });
  EXPECT_EQ(visited, 9u);
  SearchOptions o;
  o.q = 8;
  o.sizes = sizes(2, {3});
  o.budget = 1000;
  EXPECT_THROW(min_rates_search(p, o), InputError);
}

TEST(Search, SlackTargetsNeedNoRate) {
  DiscreteProblem p = asymmetric(2);
  p.targets = {1, 1, 1, 1};
  for (DecoderMode mode : {DecoderMode::kCommon, DecoderMode::kConstrained}) {
    SearchOptions o;
    o.q = 2;
    o.mode = mode;
    o.sizes = sizes(1, {2, 2});
    const SearchResult r = min_rates_search(p, o);
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_EQ(r.chain_index, 0u);
    for (double v : r.point.rates) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(r.inner_bound);
  }
}

TEST(Search, InfeasibleTargetsReportedDistinctly) {
  DiscreteProblem p = asymmetric(1);
  p.targets = {0.0, kInf, kInf, kInf};  // A cannot learn x xor y in one round
  SearchOptions o;
  o.q = 2;
  o.sizes = sizes(1, {2});
  EXPECT_THROW(min_rates_search(p, o), InfeasibleError);
}

TEST(Search, LosslessCornerApproachesConditionalEntropy) {
  const DiscreteProblem p = bsc(0.11);
  SearchOptions o;
  o.q = 8;
  o.mode = DecoderMode::kCommon;
  o.sizes = default_sizes(p, o.mode);
  const SearchResult r = min_rates_search(p, o);
  EXPECT_NEAR(r.objective, h2(0.11), 0.05);
  EXPECT_EQ(r.point.distortions.d_b, 0.0);
  EXPECT_LT(markov_residual(build_joint(p, r.chain)), 1e-9);
}

TEST(Search, ThreadCountDoesNotChangeTheResult) {
  DiscreteProblem p = asymmetric(2);
  p.targets = {0.3, 0.12, 0.0, 0.0};
  SearchOptions o;
  o.q = 4;
  o.sizes = sizes(1, {2, 2});
  o.threads = 1;
  const SearchResult a = min_rates_search(p, o);
  o.threads = 4;
  const SearchResult b = min_rates_search(p, o);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.chain_index, b.chain_index);
  EXPECT_EQ(a.point.rates, b.point.rates);
}

// Without reconstruction constraints |W| = 1 suffices in the limit. On a
// finite grid the |W| = 2 space contains the |W| = 1 space, and the |W| = 1
// search on a finer grid reaches at least the |W| = 2 value.
TEST(Search, SingletonWSufficesWithoutReconstructionConstraints) {
  DiscreteProblem p = asymmetric(1);
  p.f_a = {0, 0, 0, 0};
  p.targets = {kInf, 0.12, kInf, kInf};
  auto run = [&](std::size_t w, std::size_t q) {
    SearchOptions o;
    o.q = q;
    o.mode = DecoderMode::kConstrained;
    o.sizes = sizes(w, {2});
    return min_rates_search(p, o).objective;
  };
  const double fine = run(1, 48);
  for (std::size_t q : {2, 4, 6}) {
    const double w1 = run(1, q), w2 = run(2, q);
    EXPECT_LE(w2, w1 + 1e-12) << q;
    EXPECT_LE(fine, w2 + 1e-9) << q;
    EXPECT_LE(w1 - w2, 2.0 / q) << q;
  }
}

TEST(Io, ParsesAndReportsFieldErrors) {
  nlohmann::json doc = {
      {"schema", 1},
      {"alphabets", {{"x", 2}, {"y", 2}, {"z_a", 2}, {"z_b", 2}}},
      {"pxy", {0.445, 0.055, 0.055, 0.445}},
      {"rounds", 1},
      {"f_a", {0, 0, 0, 0}},
      {"f_b", {0, 0, 1, 1}},
      {"targets", {{"d_a", "inf"}, {"d_b", 0}, {"d_ab", "inf"}, {"d_ba", "inf"}}},
      {"mode", "common"},
      {"q", 4}};
  const DiscreteRequest r = parse_discrete_request(doc);
  EXPECT_EQ(r.problem.targets.d_a, kInf);
  EXPECT_EQ(r.options.sizes.u, (std::vector<std::size_t>{3}));
  EXPECT_EQ(r.options.weights, (std::vector<double>{1.0}));
  EXPECT_EQ(r.problem.d_b, hamming_table(2));
  const nlohmann::json echo = request_to_json(r);
  EXPECT_EQ(parse_discrete_request(echo).options.q, 4u);

  auto message = [](nlohmann::json d) {
    try {
      parse_discrete_request(d);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  auto broken = doc;
  broken.erase("pxy");
  EXPECT_NE(message(broken).find("pxy"), std::string::npos);
  broken = doc;
  broken["pxy"] = {0.5, 0.5, 0.5, 0.5};
  EXPECT_NE(message(broken).find("pxy"), std::string::npos);
  broken = doc;
  broken["alphabets"]["x"] = -1;
  EXPECT_NE(message(broken).find("alphabets.x"), std::string::npos);
  broken = doc;
  broken["targets"]["d_b"] = "lots";
  EXPECT_NE(message(broken).find("targets.d_b"), std::string::npos);
  broken = doc;
  broken["schema"] = 2;
  EXPECT_NE(message(broken).find("schema"), std::string::npos);
  broken = doc;
  broken["aux_sizes"] = {{"u", {100}}};
  EXPECT_NE(message(broken).find("aux_sizes"), std::string::npos);
  broken = doc;
  broken["mode"] = "fast";
  EXPECT_NE(message(broken).find("mode"), std::string::npos);
}
