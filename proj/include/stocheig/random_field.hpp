#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stocheig/multi_index.hpp"
#include "stocheig/tensors.hpp"

namespace stocheig {

/// Truncated Karhunen-Loeve representation of a Gaussian field evaluated at
/// a fixed set of points: log-field(x) = g0(x) + sum_j g_j(x) xi_j.
/// Modes are ordered by decreasing KL eigenvalue and sign-fixed so that each
/// mode is non-negative at the first evaluation point.
struct GaussianKL {
  Eigen::VectorXd g0;          // mean function at evaluation points
  Eigen::MatrixXd modes;       // (m_xi, n_points), row j = g_j(x)
  Eigen::VectorXd eigenvalues; // KL eigenvalues theta_j (include sigma_g^2)
  double sigma_g = 0.0;
  double corr_length = 0.0;

  int m_xi() const { return int(modes.rows()); }
  int n_points() const { return int(modes.cols()); }

  /// Pointwise truncated variance sum_j g_j(x)^2.
  Eigen::VectorXd truncated_variance() const {
    return modes.array().square().colwise().sum().transpose();
  }

  /// Calibrate the mean function so the truncated lognormal field has
  /// pointwise mean exactly target: g0(x) = ln(target) - 1/2 sum_j g_j(x)^2.
  void mean_from_target(double target) {
    if (!(target > 0.0)) throw std::invalid_argument("mean_from_target: target must be > 0");
    g0 = Eigen::VectorXd::Constant(n_points(), std::log(target)) - 0.5 * truncated_variance();
  }
};

/// gPC coefficients E_l(x) of the lognormal field, per basis index and point.
struct LognormalField {
  Eigen::MatrixXd coeffs;  // (basis size, n_points)

  int n_terms() const { return int(coeffs.rows()); }
  int n_points() const { return int(coeffs.cols()); }

  void save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("LognormalField: cannot open " + path);
    os.precision(17);
    os << "ell";
    for (int i = 0; i < n_points(); ++i) os << ",x" << i;
    os << "\n";
    for (int l = 0; l < n_terms(); ++l) {
      os << l;
      for (int i = 0; i < n_points(); ++i) os << "," << coeffs(l, i);
      os << "\n";
    }
  }
};

/// sigma_g and constant g0 such that the (untruncated) pointwise lognormal
/// exp(g0 + N(0, sigma_g^2)) has mean E0_target and CoV = std/mean as given.
inline std::pair<double, double> calibrate_lognormal(double E0_target, double cov) {
  if (!(E0_target > 0.0)) throw std::invalid_argument("calibrate_lognormal: mean must be > 0");
  if (cov < 0.0 || cov >= 1.0) throw std::invalid_argument("calibrate_lognormal: need 0 <= CoV < 1");
  const double sigma_g = std::sqrt(std::log1p(cov * cov));
  const double g0 = std::log(E0_target) - 0.5 * sigma_g * sigma_g;
  return {g0, sigma_g};
}

namespace detail {

// Transcendental root brackets for the exponential-covariance KL on [-b, b]
// with a = 1/L_corr: cos branch solves a = w tan(w b) on (n pi, n pi + pi/2)/b,
// sin branch solves w = -a tan(w b) on (n pi + pi/2, (n+1) pi)/b.  Safeguarded
// bisection; each bracket holds exactly one root.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::runtime_error("kl_1d_exponential: root bracket not found");
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    (flo * fm < 0.0 ? hi : lo) = mid;
    (flo * fm < 0.0 ? fhi : flo) = fm;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Analytic KL of C(x1,x2) = sigma_g^2 exp(-|x1-x2|/L_corr) on [0, L],
/// evaluated at the given points.  Eigenfunctions alternate between cosine
/// and sine branches centered at L/2 and are L2[0,L]-normalized; the KL
/// eigenvalue of frequency w is sigma_g^2 * 2a / (w^2 + a^2), a = 1/L_corr.
inline GaussianKL kl_1d_exponential(double L, double L_corr, double sigma_g, int m_xi,
                                    const Eigen::VectorXd& points) {
  if (!(L > 0.0) || !(L_corr > 0.0) || sigma_g < 0.0)
    throw std::invalid_argument("kl_1d_exponential: invalid parameters");
  const double a = 1.0 / L_corr;
  const double b = 0.5 * L;
  const double pi = 3.14159265358979323846;

  GaussianKL kl;
  kl.sigma_g = sigma_g;
  kl.corr_length = L_corr;
  kl.g0 = Eigen::VectorXd::Zero(points.size());
  kl.modes.resize(m_xi, points.size());
  kl.eigenvalues.resize(m_xi);

  const double eps = 1e-9;
  for (int j = 0; j < m_xi; ++j) {
    const int n = j / 2;
    double w, norm2;
    bool cos_branch = (j % 2 == 0);
    if (cos_branch) {
      auto f = [&](double x) { return a - x * std::tan(x * b); };
      const double lo = (n * pi) / b + eps, hi = (n * pi + pi / 2) / b - eps;
      w = detail::bisect(f, lo, hi);
      norm2 = b + std::sin(2.0 * w * b) / (2.0 * w);
    } else {
      auto f = [&](double x) { return x + a * std::tan(x * b); };
      const double lo = (n * pi + pi / 2) / b + eps, hi = ((n + 1) * pi) / b - eps;
      w = detail::bisect(f, lo, hi);
      norm2 = b - std::sin(2.0 * w * b) / (2.0 * w);
    }
    const double theta = sigma_g * sigma_g * 2.0 * a / (w * w + a * a);
    kl.eigenvalues[j] = theta;
    const double amp = (sigma_g > 0.0) ? std::sqrt(theta) / std::sqrt(norm2) : 0.0;
    for (int i = 0; i < points.size(); ++i) {
      const double t = points[i] - 0.5 * L;
      kl.modes(j, i) = amp * (cos_branch ? std::cos(w * t) : std::sin(w * t));
    }
    if (kl.modes(j, 0) < 0.0) kl.modes.row(j) = -kl.modes.row(j);
  }
  return kl;
}

/// Discrete (Nystrom) KL of the isotropic exponential covariance
/// sigma_g^2 exp(-||x1-x2||_2 / L_corr) on arbitrary points with quadrature
/// weights (e.g. element areas).  Eigenpairs of W^{1/2} C W^{1/2}; negative
/// roundoff eigenvalues are clipped to zero.
inline GaussianKL kl_2d_discrete(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                                 double L_corr, double sigma_g, int m_xi) {
  const int n = int(points.rows());
  if (n < m_xi) throw std::invalid_argument("kl_2d_discrete: need at least m_xi points");
  if (!(L_corr > 0.0) || sigma_g < 0.0)
    throw std::invalid_argument("kl_2d_discrete: invalid parameters");

  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      C(i, j) = sigma_g * sigma_g *
                std::exp(-(points.row(i) - points.row(j)).norm() / L_corr);
  C = 0.5 * (C + C.transpose()).eval();

  const Eigen::VectorXd s = weights.array().sqrt();
  Eigen::MatrixXd B = s.asDiagonal() * C * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));

  GaussianKL kl;
  kl.sigma_g = sigma_g;
  kl.corr_length = L_corr;
  kl.g0 = Eigen::VectorXd::Zero(n);
  kl.modes.resize(m_xi, n);
  kl.eigenvalues.resize(m_xi);
  for (int j = 0; j < m_xi; ++j) {
    double theta = es.eigenvalues()[n - 1 - j];  // descending
    if (theta < 0.0) theta = 0.0;
    kl.eigenvalues[j] = theta;
    // f = W^{-1/2} v is discretely L2-orthonormal; g_j = sqrt(theta) f
    Eigen::VectorXd g = std::sqrt(theta) * (es.eigenvectors().col(n - 1 - j).array() / s.array()).matrix();
    if (g[0] < 0.0) g = -g;
    kl.modes.row(j) = g.transpose();
  }
  return kl;
}

/// Closed-form gPC coefficients of the truncated lognormal field under the
/// orthonormal Hermite basis:
///   E_l(x) = exp(g0(x) + 1/2 sum_j g_j(x)^2) * prod_j g_j(x)^{a_j} / sqrt(a_j!)
/// where a is the multi-index of psi_l.
inline LognormalField lognormal_coeffs(const GaussianKL& kl, const GpcBasis& basis_A) {
  if (basis_A.m_xi() != kl.m_xi())
    throw std::invalid_argument("lognormal_coeffs: basis/KL dimension mismatch");
  const int npts = kl.n_points();
  LognormalField field;
  field.coeffs.resize(basis_A.size(), npts);
  const Eigen::VectorXd base =
      (kl.g0.array() + 0.5 * kl.truncated_variance().array()).exp().matrix();
  for (int l = 0; l < basis_A.size(); ++l) {
    const MultiIndex& a = basis_A.index(l);
    for (int i = 0; i < npts; ++i) {
      double v = base[i];
      for (int j = 0; j < kl.m_xi(); ++j)
        if (a[j] > 0) v *= std::pow(kl.modes(j, i), a[j]) / std::sqrt(detail::fact(a[j]));
      field.coeffs(l, i) = v;
    }
  }
  return field;
}

}  // namespace stocheig
