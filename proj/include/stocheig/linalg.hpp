#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stocheig {

/// Full symmetric eigendecomposition, eigenvalues ascending, eigenvectors
/// orthonormal columns with the largest-magnitude entry of each made
/// non-negative (reproducible signs).
struct SymEigResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

namespace detail {
inline void fix_vector_signs(Eigen::MatrixXd& V) {
  for (int c = 0; c < V.cols(); ++c) {
    int imax = 0;
    V.col(c).cwiseAbs().maxCoeff(&imax);
    if (V(imax, c) < 0.0) V.col(c) = -V.col(c);
  }
}
}  // namespace detail

inline void require_symmetric(const Eigen::MatrixXd& A, const char* who) {
  const double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

/// Householder tridiagonalization + implicit QL (Eigen's SelfAdjointEigenSolver).
inline SymEigResult sym_eig(const Eigen::MatrixXd& A) {
  require_symmetric(A, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
  SymEigResult r{es.eigenvalues(), es.eigenvectors()};
  detail::fix_vector_signs(r.vectors);
  return r;
}

/// Cyclic Jacobi eigensolver with relative rotation thresholds.  For SPD
/// matrices whose diagonally scaled condition number is moderate this
/// attains high relative accuracy on small eigenvalues, which LAPACK-style
/// tridiagonalization does not (its error is ~eps*||A||).  Used for
/// sampling solves on badly conditioned operators and as a test oracle.
inline SymEigResult sym_eig_jacobi(const Eigen::MatrixXd& A_in, int max_sweeps = 30) {
  require_symmetric(A_in, "sym_eig_jacobi");
  Eigen::MatrixXd A = 0.5 * (A_in + A_in.transpose());
  const int n = int(A.rows());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double app = A(p, p), aqq = A(q, q);
        const double rel = std::abs(apq) / std::sqrt(std::abs(app) * std::abs(aqq) + 1e-300);
        if (rel < 1e-15) continue;
        off = std::max(off, rel);
        const double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- J^T A J on rows/cols p,q
        for (int i = 0; i < n; ++i) {
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
    if (off < 1e-15) break;
  }
  SymEigResult r;
  r.values = A.diagonal();
  r.vectors = V;
  // ascending
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](int a, int b) { return r.values[a] < r.values[b]; });
  Eigen::VectorXd ev(n);
  Eigen::MatrixXd W(n, n);
  for (int i = 0; i < n; ++i) {
    ev[i] = r.values[perm[i]];
    W.col(i) = r.vectors.col(perm[i]);
  }
  r.values = ev;
  r.vectors = W;
  detail::fix_vector_signs(r.vectors);
  return r;
}

/// Lower-triangular Cholesky factor of an SPD matrix; reports the offending
/// pivot index on failure.
inline Eigen::MatrixXd cholesky(const Eigen::MatrixXd& M) {
  require_symmetric(M, "cholesky");
  const int n = int(M.rows());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = M(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0))
      throw std::runtime_error("cholesky: non-positive pivot at index " + std::to_string(j));
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i)
      L(i, j) = (M(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return L;
}

/// Cached factorization of a symmetric matrix for repeated solves.
/// SPD inputs use LLT; indefinite (e.g. shifted) matrices fall back to
/// partial-pivot LU.  The factorization is immutable after construction and
/// safe for concurrent solves with distinct right-hand sides.
class LinearSolver {
 public:
  explicit LinearSolver(const Eigen::MatrixXd& A) {
    require_symmetric(A, "LinearSolver");
    llt_ = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(A);
    if (llt_->info() != Eigen::Success) {
      llt_.reset();
      lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(A);
    }
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const {
    return llt_ ? llt_->solve(B) : lu_->solve(B);
  }

  bool used_cholesky() const { return bool(llt_); }

 private:
  std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> llt_;
  std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

/// One-shot solve with residual check.
inline Eigen::MatrixXd factor_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  LinearSolver solver(A);
  Eigen::MatrixXd X = solver.solve(B);
  const double bn = B.norm();
  if (bn > 0.0 && (A * X - B).norm() > 1e-10 * bn * std::max(1.0, A.norm() / std::max(bn, 1e-300)))
    throw std::runtime_error("factor_solve: matrix is singular to working precision");
  return X;
}

struct PcgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for a matrix-free SPD operator.
/// Throws on detected negative curvature (operator not SPD).
inline PcgResult pcg_kron(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precond,
                          const Eigen::VectorXd& b, double tol = 1e-10, int maxit = 500) {
  PcgResult res;
  const double bnorm = b.norm();
  res.x = Eigen::VectorXd::Zero(b.size());
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < maxit; ++it) {
    Eigen::VectorXd Ap = op(p);
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0) throw std::runtime_error("pcg_kron: negative curvature, operator not SPD");
    const double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    res.iterations = it + 1;
    res.relative_residual = r.norm() / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    z = precond(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

}  // namespace stocheig
