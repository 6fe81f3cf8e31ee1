#include "ircr/gaussian_core.hpp"

#include <algorithm>
#include <cmath>

namespace ircr {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw InputError(std::string(field) + " must be finite");
  }
}

std::vector<std::size_t> concat(std::span<const std::size_t> a,
                                std::span<const std::size_t> b) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Pseudo-inverse of a symmetric PSD matrix, dropping eigenvalues <= tol.
Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// Covariance of A given C (Schur complement through the pseudo-inverse).
Eigen::MatrixXd conditional_cov(const CovMatrix& cov,
                                std::span<const std::size_t> a,
                                std::span<const std::size_t> c, double tol) {
  Eigen::MatrixXd saa = cov.block(a);
  if (c.empty()) return saa;
  Eigen::MatrixXd sac = cov.block(a, c);
  Eigen::MatrixXd scc = cov.block(c);
  Eigen::MatrixXd out = saa - sac * pinv_psd(scc, tol) * sac.transpose();
  return 0.5 * (out + out.transpose());
}

struct Support {
  int rank = 0;
  double log2_pdet = 0.0;
};

Support support_of(const Eigen::MatrixXd& m, double tol) {
  Support s;
  if (m.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > tol) {
      ++s.rank;
      s.log2_pdet += std::log2(ev);
    }
  }
  return s;
}

}  // namespace

void GaussianPair::validate() const {
  if (!(std::isfinite(sigma_x2) && sigma_x2 > 0.0)) {
    throw InputError("sigma_x2 must be a positive finite variance");
  }
  if (!(std::isfinite(sigma_v2) && sigma_v2 > 0.0)) {
    throw InputError("sigma_v2 must be a positive finite variance");
  }
}

double LinearFn::variance(const GaussianPair& src) const {
  // var(alpha X + beta (X + V)) = (alpha + beta)^2 sx + beta^2 sv
  const double c = alpha + beta;
  return c * c * src.sigma_x2 + beta * beta * src.sigma_v2;
}

void LinearFn::validate() const {
  require_finite(alpha, "alpha");
  require_finite(beta, "beta");
}

void TestChannels::validate() const {
  require_finite(a1, "a1");
  require_finite(a2, "a2");
  require_finite(n1, "n1");
  require_finite(n2, "n2");
  if (n1 < 0.0) throw InputError("n1 must be a nonnegative noise variance");
  if (n2 < 0.0) throw InputError("n2 must be a nonnegative noise variance");
}

CovMatrix::CovMatrix(std::vector<std::string> names, Eigen::MatrixXd values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (values_.rows() != values_.cols() ||
      static_cast<std::size_t>(values_.rows()) != names_.size()) {
    throw InputError("covariance shape does not match variable names");
  }
}

std::size_t CovMatrix::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InputError("unknown variable '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

double CovMatrix::psd_tolerance() const {
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    max_diag = std::max(max_diag, std::abs(values_(i, i)));
  }
  return kTolPsd * std::max(max_diag, std::numeric_limits<double>::min());
}

void CovMatrix::validate() const {
  const double tol = psd_tolerance();
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (!std::isfinite(values_(i, j))) {
        throw InputError("covariance entry is not finite");
      }
      if (std::abs(values_(i, j) - values_(j, i)) > tol) {
        throw InputError("covariance is not symmetric");
      }
    }
  }
  if (values_.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values_,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw InputError("covariance is not positive semidefinite");
  }
}

Eigen::MatrixXd CovMatrix::block(std::span<const std::size_t> idx) const {
  return block(idx, idx);
}

Eigen::MatrixXd CovMatrix::block(std::span<const std::size_t> rows,
                                 std::span<const std::size_t> cols) const {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(i, j) = values_(rows[i], cols[j]);
    }
  }
  return out;
}

CovMatrix joint_covariance(const GaussianPair& src, const TestChannels& tc) {
  src.validate();
  tc.validate();
  const double sx = src.sigma_x2;
  const double sy = src.sigma_y2();
  Eigen::Matrix4d m;
  const double var_u1 = tc.a1 * tc.a1 * sx + tc.n1;
  const double var_u2 = tc.a2 * tc.a2 * sy + tc.n2;
  // clang-format off
  m << sx,          sx,          tc.a1 * sx,         tc.a2 * sx,
       sx,          sy,          tc.a1 * sx,         tc.a2 * sy,
       tc.a1 * sx,  tc.a1 * sx,  var_u1,             tc.a1 * tc.a2 * sx,
       tc.a2 * sx,  tc.a2 * sy,  tc.a1 * tc.a2 * sx, var_u2;
  // clang-format on
  return CovMatrix({"X", "Y", "U1", "U2"}, m);
}

double cond_mutual_info(const CovMatrix& cov, std::span<const std::size_t> a,
                        std::span<const std::size_t> b,
                        std::span<const std::size_t> c) {
  if (a.empty() || b.empty()) {
    throw InputError("cond_mutual_info needs non-empty variable sets");
  }
  std::vector<std::size_t> all = concat(concat(a, b), c);
  for (std::size_t i : all) {
    if (i >= cov.size()) throw InputError("variable index out of range");
  }
  std::vector<std::size_t> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("variable sets must be disjoint");
  }
  cov.validate();

  const double tol = cov.psd_tolerance();
  const std::vector<std::size_t> bc = concat(b, c);
  const Support given_c = support_of(conditional_cov(cov, a, c, tol), tol);
  const Support given_bc = support_of(conditional_cov(cov, a, bc, tol), tol);

  // Conditioning on B can only shrink A's support. A lost dimension means B
  // pins down a continuous component of A exactly.
  if (given_c.rank > given_bc.rank) return kInf;
  const double info = 0.5 * (given_c.log2_pdet - given_bc.log2_pdet);
  return std::max(info, 0.0);
}

ErrorMoments decoding_error(const GaussianPair& src, const TestChannels& tc,
                            const LinearFn& f) {
  // E = alpha X + beta Y - alpha U1 - beta U2 written on (X, V, N1, N2):
  const double cx = f.alpha * (1.0 - tc.a1) + f.beta * (1.0 - tc.a2);
  const double cv = f.beta * (1.0 - tc.a2);
  const double cn1 = -f.alpha;
  const double cn2 = -f.beta;
  ErrorMoments m;
  m.variance = cx * cx * src.sigma_x2 + cv * cv * src.sigma_v2 +
               cn1 * cn1 * tc.n1 + cn2 * cn2 * tc.n2;
  m.cov_x = cx * src.sigma_x2;
  m.cov_y = cx * src.sigma_x2 + cv * src.sigma_v2;
  return m;
}

AchievedPoint achieved_point(const GaussianPair& src, const TestChannels& tc,
                             const LinearFn& fa, const LinearFn& fb) {
  fa.validate();
  fb.validate();
  const CovMatrix cov = joint_covariance(src, tc);
  const std::array<std::size_t, 1> x{kVarX}, y{kVarY}, u1{kVarU1}, u2{kVarU2};
  const std::array<std::size_t, 2> x_u1{kVarX, kVarU1};

  AchievedPoint p;
  p.r1 = cond_mutual_info(cov, x, u1, y);
  p.r2 = cond_mutual_info(cov, y, u2, x_u1);
  const ErrorMoments ea = decoding_error(src, tc, fa);
  const ErrorMoments eb = decoding_error(src, tc, fb);
  p.d_a = ea.variance;
  p.d_b = eb.variance;
  p.kappa = {ea.cov_x, ea.cov_y, eb.cov_x, eb.cov_y};
  return p;
}

ChannelRates channel_rates_closed_form(const GaussianPair& src,
                                       const TestChannels& tc) {
  auto rate = [](double gain, double signal_var, double noise) {
    const double s = gain * gain * signal_var;
    if (s == 0.0) return 0.0;
    if (noise == 0.0) return kInf;
    return 0.5 * std::log2(1.0 + s / noise);
  };
  return {rate(tc.a1, src.sigma_x_given_y2(), tc.n1),
          rate(tc.a2, src.sigma_v2, tc.n2)};
}

}  // namespace ircr
