#pragma once

// Finite-alphabet t-round region with reconstruction constraints, evaluated
// by exhaustive search over quantized auxiliary channels.
//
// Auxiliary structure, sequential schedule starting at terminal A:
//   p(x, y) p(w_A | x) p(w_B | y) prod_j p(u_j | x, w_A, u^{j-1})   (j odd)
//                                        p(u_j | y, w_B, u^{j-1})   (j even)
// Every Markov chain of the region holds by this factorization. Rates:
//   R_j >= I(X; U_j | Y, U^{j-1}) (j odd),  I(Y; U_j | X, U^{j-1}) (j even).
//
// Joint pmf axis order: X, Y, W_A, W_B, U_1, ..., U_t.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ircr/errors.hpp"
#include "ircr/pmf.hpp"

namespace ircr {

inline constexpr std::size_t kAxisX = 0;
inline constexpr std::size_t kAxisY = 1;
inline constexpr std::size_t kAxisWA = 2;
inline constexpr std::size_t kAxisWB = 3;
inline constexpr std::size_t kAxisU1 = 4;

struct DistortionTargets {
  double d_a = 0.0;
  double d_b = 0.0;
  double d_ab = 0.0;
  double d_ba = 0.0;
};

using Distortions4 = DistortionTargets;

// Tables are row-major. Functions map (x, y) -> z. Distortion tables are
// |Z| x |Z|: d_a(z, zhat), d_ab(zhat_A, what_B), d_b(z, zhat), d_ba(zhat_B,
// what_A). Reconstruction alphabets equal the function alphabets.
struct DiscreteProblem {
  std::size_t nx = 2;
  std::size_t ny = 2;
  std::size_t nz_a = 2;
  std::size_t nz_b = 2;
  std::vector<double> pxy;
  int rounds = 1;
  std::vector<std::size_t> f_a;
  std::vector<std::size_t> f_b;
  std::vector<double> d_a;
  std::vector<double> d_b;
  std::vector<double> d_ab;
  std::vector<double> d_ba;
  DistortionTargets targets;

  void validate() const;
  double pxy_at(std::size_t x, std::size_t y) const { return pxy[x * ny + y]; }
};

// Hamming distortion on an alphabet of size n.
std::vector<double> hamming_table(std::size_t n);

enum class DecoderMode { kConstrained, kCommon };

struct AuxSizes {
  std::size_t w_a = 1;
  std::size_t w_b = 1;
  std::vector<std::size_t> u;  // |U_1|, ..., |U_t|
};

// Cardinality caps: |W_A|, |W_B| <= 2 and
//   |U_j| <= |X| |W_A| prod_{i<j} |U_i| + t - j + 5 (j odd; |Y| |W_B| for even).
// The caps for U_j use the given sizes of earlier rounds.
std::vector<std::size_t> cardinality_caps(const DiscreteProblem& p,
                                          const AuxSizes& sizes);

// Throws InputError on a size of zero, a round-count mismatch, or a cap
// violation.
void validate_sizes(const DiscreteProblem& p, const AuxSizes& sizes);

// Default sizes: |W| = 2 in constrained mode and 1 in common mode;
// |U_j| = min(cap_j, 3).
AuxSizes default_sizes(const DiscreteProblem& p, DecoderMode mode);

// True when any size is below its cap (the search is then an inner bound).
bool under_cap(const DiscreteProblem& p, const AuxSizes& sizes,
               DecoderMode mode);

struct AuxChain {
  AuxSizes sizes;
  std::vector<double> w_a_channel;  // nx x |W_A|
  std::vector<double> w_b_channel;  // ny x |W_B|
  // Round j (0-based): rows indexed by (source symbol, w, u^{j}) with U_1 the
  // most significant digit of u^{j}; columns are U_{j+1} symbols.
  std::vector<std::vector<double>> round_channels;

  void validate(const DiscreteProblem& p) const;
};

std::size_t round_row_count(const DiscreteProblem& p, const AuxSizes& s,
                            std::size_t round);

// Channel that ignores its inputs and outputs symbol 0.
AuxChain constant_chain(const DiscreteProblem& p, const AuxSizes& sizes);

JointPmf build_joint(const DiscreteProblem& p, const AuxChain& chain);

// Per-round informational rates (bits) of a joint built by build_joint.
std::vector<double> round_rates(const JointPmf& joint);

// Largest conditional-independence residual (bits) over the region's Markov
// chains: W_A - X - Y - W_B, U_j - (X, W_A, U^{j-1}) - Y (odd j) and
// U_j - (Y, W_B, U^{j-1}) - X (even j).
double markov_residual(const JointPmf& joint);

// Decoder tables. In constrained mode z_a and w_a are indexed by
// (x, w_A, u^t) and z_b and w_b by (y, w_B, u^t). In common mode all four
// are indexed by u^t, with w_b == z_a and w_a == z_b.
struct DecoderTables {
  DecoderMode mode = DecoderMode::kCommon;
  std::vector<std::size_t> z_a;  // Zhat_A, computed at A
  std::vector<std::size_t> w_b;  // What_B, B's estimate of Zhat_A
  std::vector<std::size_t> z_b;  // Zhat_B, computed at B
  std::vector<std::size_t> w_a;  // What_A, A's estimate of Zhat_B
};

struct DecoderResult {
  DecoderTables tables;
  Distortions4 distortions;
};

// Common mode: one shared table per function minimizing E[d(Z, .) | u^t].
// Constrained mode, per function pair: the sequential candidate (Zhat
// minimizing its own distortion, then What minimizing the reconstruction
// distortion against that Zhat) and the agreement candidate (one value per
// connected component of the positive-probability graph between the two
// terminals' observations at each u^t). The sequential candidate is used
// unless only the agreement candidate meets the problem's targets.
// Zero-probability cells decode to symbol 0; ties go to the smallest symbol.
DecoderResult optimal_decoders(const DiscreteProblem& p, const JointPmf& joint,
                               DecoderMode mode);

// Expected distortions of given tables.
Distortions4 evaluate_decoders(const DiscreteProblem& p, const JointPmf& joint,
                               const DecoderTables& tables);

bool meets_targets(const Distortions4& achieved,
                   const DistortionTargets& targets, double tol = 1e-12);

// Compositions of q into m parts, as probability vectors with entries k/q.
// Lexicographic order with the first entry descending from q.
std::vector<std::vector<double>> simplex_grid(std::size_t m, std::size_t q);

struct SearchOptions {
  std::size_t q = 4;
  DecoderMode mode = DecoderMode::kCommon;
  AuxSizes sizes;
  std::vector<double> weights;  // per round; empty = all ones
  std::uint64_t budget = 100'000'000;
  unsigned threads = 0;  // 0 = hardware concurrency
  double feasibility_tol = 1e-12;
};

struct RegionPoint4 {
  std::vector<double> rates;
  Distortions4 distortions;
};

struct SearchResult {
  RegionPoint4 point;
  double objective = 0.0;
  AuxChain chain;
  DecoderTables decoders;
  std::uint64_t chain_index = 0;
  std::uint64_t chains_evaluated = 0;
  bool inner_bound = false;
  std::vector<std::size_t> caps;
};

// Number of AuxChain tables on the q-grid; saturates at UINT64_MAX.
std::uint64_t search_space_size(const DiscreteProblem& p,
                                const AuxSizes& sizes, std::size_t q);

// Visits every chain on the q-grid in index order.
void for_each_chain(
    const DiscreteProblem& p, const AuxSizes& sizes, std::size_t q,
    const std::function<void(std::uint64_t, const AuxChain&)>& visit);

// Minimizes the weighted rate sum over all chains whose decoders meet the
// targets. Ties go to the smallest chain index, independent of thread count.
// Throws InputError when the space exceeds the budget and InfeasibleError
// when no chain meets the targets.
SearchResult min_rates_search(const DiscreteProblem& p,
                              const SearchOptions& opt);

}  // namespace ircr
