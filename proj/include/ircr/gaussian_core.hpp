#pragma once

// Covariance algebra and Gaussian information measures for the source model
// X ~ N(0, sx), Y = X + V with V ~ N(0, sv) independent of X.
//
// All rates are in bits. +infinity is a legitimate rate value (lossless
// description of a continuous quantity) and is returned, never thrown.

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ircr/errors.hpp"

namespace ircr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Eigenvalues below kTolPsd * (largest diagonal entry) are exact zeros.
inline constexpr double kTolPsd = 1e-9;

struct GaussianPair {
  double sigma_x2 = 1.0;
  double sigma_v2 = 1.0;

  double sigma_y2() const { return sigma_x2 + sigma_v2; }
  // Conditional variance of X given Y.
  double sigma_x_given_y2() const { return sigma_x2 * sigma_v2 / sigma_y2(); }

  void validate() const;
};

// Z = alpha * X + beta * Y.
struct LinearFn {
  double alpha = 0.0;
  double beta = 0.0;

  bool is_constant() const { return alpha == 0.0 && beta == 0.0; }
  double variance(const GaussianPair& src) const;
  void validate() const;
};

// U1 = a1 X + N1, U2 = a2 Y + N2 with N1 ~ N(0, n1), N2 ~ N(0, n2) independent
// of each other and of (X, Y). The Markov chain U1 - X - Y - U2 holds by
// construction.
struct TestChannels {
  double a1 = 0.0;
  double n1 = 0.0;
  double a2 = 0.0;
  double n2 = 0.0;

  void validate() const;
};

// kx_k = cov(Z_k - Zhat_k, X), ky_k = cov(Z_k - Zhat_k, Y).
struct KappaVec {
  double kx_a = 0.0;
  double ky_a = 0.0;
  double kx_b = 0.0;
  double ky_b = 0.0;

  std::array<double, 4> as_array() const { return {kx_a, ky_a, kx_b, ky_b}; }
  static KappaVec from_array(const std::array<double, 4>& v) {
    return {v[0], v[1], v[2], v[3]};
  }
};

// Symmetric covariance over an ordered list of named scalar variables.
class CovMatrix {
 public:
  CovMatrix(std::vector<std::string> names, Eigen::MatrixXd values);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  std::size_t index_of(const std::string& name) const;

  // Absolute eigenvalue threshold used for support projection.
  double psd_tolerance() const;

  // Throws InputError when asymmetric or when an eigenvalue is below
  // -psd_tolerance().
  void validate() const;

  Eigen::MatrixXd block(std::span<const std::size_t> idx) const;
  Eigen::MatrixXd block(std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;
};

// Variable order of joint_covariance().
inline constexpr std::size_t kVarX = 0;
inline constexpr std::size_t kVarY = 1;
inline constexpr std::size_t kVarU1 = 2;
inline constexpr std::size_t kVarU2 = 3;

// Covariance of (X, Y, U1, U2).
CovMatrix joint_covariance(const GaussianPair& src, const TestChannels& tc);

// I(A; B | C) in bits for jointly Gaussian variables. Rank-deficient blocks
// are handled on their support: the result is +inf when conditioning on B
// removes a dimension of A's conditional support, otherwise the
// pseudo-determinant ratio. Sets must be disjoint; A and B non-empty.
double cond_mutual_info(const CovMatrix& cov, std::span<const std::size_t> a,
                        std::span<const std::size_t> b,
                        std::span<const std::size_t> c);

struct AchievedPoint {
  double r1 = 0.0;   // I(X; U1 | Y)
  double r2 = 0.0;   // I(Y; U2 | X, U1)
  double d_a = 0.0;  // var(Z_A - alpha_A U1 - beta_A U2)
  double d_b = 0.0;
  KappaVec kappa;
};

// Rates, distortions and realized kappas of the two-round linear scheme in
// which both terminals decode Zhat_k = alpha_k U1 + beta_k U2. Rates come
// from the log-det route (cond_mutual_info on joint_covariance).
AchievedPoint achieved_point(const GaussianPair& src, const TestChannels& tc,
                             const LinearFn& fa, const LinearFn& fb);

// Closed-form rates of the same scheme:
//   R1 = 1/2 log2(1 + a1^2 sigma_{X|Y}^2 / n1),  R2 = 1/2 log2(1 + a2^2 sv / n2).
struct ChannelRates {
  double r1 = 0.0;
  double r2 = 0.0;
};
ChannelRates channel_rates_closed_form(const GaussianPair& src,
                                       const TestChannels& tc);

// Error statistics of Z - (alpha U1 + beta U2): variance and covariances with
// X and Y. Exact, via the independent basis (X, V, N1, N2).
struct ErrorMoments {
  double variance = 0.0;
  double cov_x = 0.0;
  double cov_y = 0.0;
};
ErrorMoments decoding_error(const GaussianPair& src, const TestChannels& tc,
                            const LinearFn& f);

}  // namespace ircr
