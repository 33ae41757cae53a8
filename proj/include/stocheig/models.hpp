#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stocheig/linalg.hpp"
#include "stocheig/random_field.hpp"

namespace stocheig {

/// Generalized eigenvalue problem K(xi) u = lambda M u with the stiffness
/// given as a gPC expansion K(xi) = sum_l K_l psi_l(xi).
struct GeneralizedProblem {
  std::vector<Eigen::MatrixXd> K;  // M_A + 1 symmetric stiffness matrices
  Eigen::MatrixXd M;               // SPD mass matrix
  std::vector<int> free_dofs;      // kept rows/cols of the full assembly
  std::string description;

  int n_dofs() const { return int(M.rows()); }
  int n_terms() const { return int(K.size()); }
};

/// Standard-form operator expansion A(xi) = sum_l A_l psi_l(xi), A_0 SPD.
struct MatrixExpansion {
  std::vector<Eigen::MatrixXd> A;
  Eigen::MatrixXd chol_mass;  // L with M = L L^T; maps back u = L^{-T} w
  int m_xi = 0;
  int degree = 0;  // gPC degree of the operator expansion (2p)

  int n_dofs() const { return A.empty() ? 0 : int(A[0].rows()); }
  int n_terms() const { return int(A.size()); }
};

struct BeamParams {
  double E0 = 1e8;          // mean Young's modulus of the lognormal field
  double nu = 0.30;
  double length = 1.0;
  double thickness = 0.001;
  double width = 1.0;
  double kappa = 5.0 / 6.0;
  double rho = 1.0;
};

/// Timoshenko cantilever beam with linear elements, 2-point Gauss bending
/// and consistent mass (translational + rotational), 1-point reduced shear.
/// DOFs (w_i, theta_i) per node; w and theta clamped at x = 0.  The field
/// supplies per-element modulus coefficients E_l at element midpoints.
inline GeneralizedProblem timoshenko_assemble(const BeamParams& params, int n_elements,
                                              const LognormalField& field) {
  if (n_elements < 2) throw std::invalid_argument("timoshenko_assemble: need >= 2 elements");
  if (field.n_points() != n_elements)
    throw std::invalid_argument("timoshenko_assemble: field must have one value per element");
  const double h = params.length / n_elements;
  if (!(h > 0.0)) throw std::runtime_error("timoshenko_assemble: singular element geometry");
  const double area = params.width * params.thickness;
  const double inertia = params.width * std::pow(params.thickness, 3) / 12.0;
  const int n_nodes = n_elements + 1;
  const int ndof = 2 * n_nodes;
  const int nexp = field.n_terms();

  // unit-modulus element stiffness: bending EI B_b^T B_b (2-pt) +
  // shear kappa A/(2(1+nu)) B_s^T B_s (1-pt reduced)
  Eigen::Matrix4d Kb = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d Ksh = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d Me = Eigen::Matrix4d::Zero();
  const double gp2[2] = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  for (double gx : gp2) {
    const double N1 = 0.5 * (1.0 - gx), N2 = 0.5 * (1.0 + gx);
    const double dN1 = -1.0 / h, dN2 = 1.0 / h;
    Eigen::RowVector4d Bb(0.0, dN1, 0.0, dN2);
    Kb += inertia * Bb.transpose() * Bb * (h / 2.0);
    Eigen::RowVector4d Nw(N1, 0.0, N2, 0.0), Nt(0.0, N1, 0.0, N2);
    Me += params.rho * (area * Nw.transpose() * Nw + inertia * Nt.transpose() * Nt) * (h / 2.0);
  }
  {  // single midpoint Gauss point, weight 2
    const double N1 = 0.5, N2 = 0.5, dN1 = -1.0 / h, dN2 = 1.0 / h;
    Eigen::RowVector4d Bs(dN1, -N1, dN2, -N2);
    Ksh += params.kappa * area / (2.0 * (1.0 + params.nu)) * Bs.transpose() * Bs * (2.0 * h / 2.0);
  }
  const Eigen::Matrix4d Ke_unit = Kb + Ksh;

  GeneralizedProblem gp;
  gp.description = "timoshenko_beam(" + std::to_string(n_elements) + " elements)";
  gp.K.assign(nexp, Eigen::MatrixXd::Zero(ndof, ndof));
  gp.M = Eigen::MatrixXd::Zero(ndof, ndof);
  for (int e = 0; e < n_elements; ++e) {
    const int dofs[4] = {2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        gp.M(dofs[a], dofs[b]) += Me(a, b);
        for (int l = 0; l < nexp; ++l)
          gp.K[l](dofs[a], dofs[b]) += field.coeffs(l, e) * Ke_unit(a, b);
      }
  }
  // cantilever: clamp w, theta at node 0
  for (int d = 2; d < ndof; ++d) gp.free_dofs.push_back(d);
  const int nf = int(gp.free_dofs.size());
  Eigen::MatrixXd Mf(nf, nf);
  std::vector<Eigen::MatrixXd> Kf(nexp, Eigen::MatrixXd(nf, nf));
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b) {
      Mf(a, b) = gp.M(gp.free_dofs[a], gp.free_dofs[b]);
      for (int l = 0; l < nexp; ++l) Kf[l](a, b) = gp.K[l](gp.free_dofs[a], gp.free_dofs[b]);
    }
  gp.M = std::move(Mf);
  gp.K = std::move(Kf);
  return gp;
}

struct PlateParams {
  double E0 = 10920.0;
  double nu = 0.30;
  double side = 1.0;
  double thickness = 0.1;
  double kappa = 5.0 / 6.0;
  double rho = 1.0;
};

/// Mindlin plate on an nx x ny grid of bilinear Q4 elements with selective
/// reduced integration (2x2 bending, 1x1 shear) and consistent mass with
/// rotary inertia.  All three DOFs (w, theta_x, theta_y) are fixed on every
/// boundary node; a 10x10 mesh leaves 243 free DOFs.  One field value per
/// element, at the element center.
inline GeneralizedProblem mindlin_assemble(const PlateParams& params, int nx, int ny,
                                           const LognormalField& field) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("mindlin_assemble: need >= 2x2 elements");
  if (field.n_points() != nx * ny)
    throw std::invalid_argument("mindlin_assemble: field must have one value per element");
  const double hx = params.side / nx, hy = params.side / ny;
  if (!(hx > 0.0 && hy > 0.0)) throw std::runtime_error("mindlin_assemble: singular element geometry");
  const double t = params.thickness;
  const int nnx = nx + 1, nny = ny + 1;
  const int nn = nnx * nny;
  const int ndof = 3 * nn;  // block layout [w | theta_x | theta_y]
  const int nexp = field.n_terms();
  auto node = [nnx](int i, int j) { return j * nnx + i; };

  Eigen::Matrix3d Db;  // unit-modulus bending constitutive matrix
  Db << 1.0, params.nu, 0.0, params.nu, 1.0, 0.0, 0.0, 0.0, (1.0 - params.nu) / 2.0;
  Db *= std::pow(t, 3) / 12.0 / (1.0 - params.nu * params.nu);
  const double Gs = params.kappa * t / (2.0 * (1.0 + params.nu));  // unit-modulus shear

  // 12x12 unit-modulus element stiffness and mass, DOF order
  // [w1..w4, tx1..tx4, ty1..ty4]
  Eigen::Matrix<double, 12, 12> Ke = Eigen::Matrix<double, 12, 12>::Zero();
  Eigen::Matrix<double, 12, 12> Me = Eigen::Matrix<double, 12, 12>::Zero();
  const double detJ = (hx / 2.0) * (hy / 2.0);
  auto shape = [&](double xi, double eta, Eigen::Vector4d& N, Eigen::Vector4d& dNx,
                   Eigen::Vector4d& dNy) {
    N << 0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
        0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta);
    Eigen::Vector4d dxi, deta;
    dxi << -0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta);
    deta << -0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi);
    dNx = dxi / (hx / 2.0);
    dNy = deta / (hy / 2.0);
  };
  const double gp2[2] = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  Eigen::Vector4d N, dNx, dNy;
  for (double gx : gp2)
    for (double gy : gp2) {
      shape(gx, gy, N, dNx, dNy);
      Eigen::Matrix<double, 3, 12> Bb = Eigen::Matrix<double, 3, 12>::Zero();
      Bb.block<1, 4>(0, 4) = dNx.transpose();
      Bb.block<1, 4>(1, 8) = dNy.transpose();
      Bb.block<1, 4>(2, 4) = dNy.transpose();
      Bb.block<1, 4>(2, 8) = dNx.transpose();
      Ke += Bb.transpose() * Db * Bb * detJ;
      Eigen::Matrix<double, 1, 12> Nw = Eigen::Matrix<double, 1, 12>::Zero();
      Eigen::Matrix<double, 1, 12> Ntx = Nw, Nty = Nw;
      Nw.block<1, 4>(0, 0) = N.transpose();
      Ntx.block<1, 4>(0, 4) = N.transpose();
      Nty.block<1, 4>(0, 8) = N.transpose();
      Me += params.rho *
            (t * Nw.transpose() * Nw +
             std::pow(t, 3) / 12.0 * (Ntx.transpose() * Ntx + Nty.transpose() * Nty)) *
            detJ;
    }
  {  // 1x1 reduced shear
    shape(0.0, 0.0, N, dNx, dNy);
    Eigen::Matrix<double, 2, 12> Bs = Eigen::Matrix<double, 2, 12>::Zero();
    Bs.block<1, 4>(0, 0) = dNx.transpose();
    Bs.block<1, 4>(0, 4) = N.transpose();
    Bs.block<1, 4>(1, 0) = dNy.transpose();
    Bs.block<1, 4>(1, 8) = N.transpose();
    Ke += Gs * Bs.transpose() * Bs * (4.0 * detJ);
  }

  GeneralizedProblem gp;
  gp.description = "mindlin_plate(" + std::to_string(nx) + "x" + std::to_string(ny) + ")";
  gp.K.assign(nexp, Eigen::MatrixXd::Zero(ndof, ndof));
  gp.M = Eigen::MatrixXd::Zero(ndof, ndof);
  for (int ey = 0; ey < ny; ++ey)
    for (int ex = 0; ex < nx; ++ex) {
      const int nd[4] = {node(ex, ey), node(ex + 1, ey), node(ex + 1, ey + 1), node(ex, ey + 1)};
      int gd[12];
      for (int a = 0; a < 4; ++a) {
        gd[a] = nd[a];
        gd[4 + a] = nn + nd[a];
        gd[8 + a] = 2 * nn + nd[a];
      }
      const int e = ey * nx + ex;
      for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b) {
          gp.M(gd[a], gd[b]) += Me(a, b);
          for (int l = 0; l < nexp; ++l)
            gp.K[l](gd[a], gd[b]) += field.coeffs(l, e) * Ke(a, b);
        }
    }
  std::vector<bool> fixed(ndof, false);
  for (int j = 0; j < nny; ++j)
    for (int i = 0; i < nnx; ++i)
      if (i == 0 || j == 0 || i == nnx - 1 || j == nny - 1) {
        const int n0 = node(i, j);
        fixed[n0] = fixed[nn + n0] = fixed[2 * nn + n0] = true;
      }
  for (int d = 0; d < ndof; ++d)
    if (!fixed[d]) gp.free_dofs.push_back(d);
  const int nf = int(gp.free_dofs.size());
  Eigen::MatrixXd Mf(nf, nf);
  std::vector<Eigen::MatrixXd> Kf(nexp, Eigen::MatrixXd(nf, nf));
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b) {
      Mf(a, b) = gp.M(gp.free_dofs[a], gp.free_dofs[b]);
      for (int l = 0; l < nexp; ++l) Kf[l](a, b) = gp.K[l](gp.free_dofs[a], gp.free_dofs[b]);
    }
  gp.M = std::move(Mf);
  gp.K = std::move(Kf);
  return gp;
}

/// Cholesky reduction of K(xi) u = lambda M u to standard form:
/// A_l = L^{-1} K_l L^{-T} with M = L L^T, symmetrized by averaging.
/// Eigenvectors of the standard problem map back via u = L^{-T} w.
inline MatrixExpansion to_standard(const GeneralizedProblem& gp, int m_xi = 0, int degree = 0) {
  MatrixExpansion ex;
  ex.chol_mass = cholesky(gp.M);
  ex.m_xi = m_xi;
  ex.degree = degree;
  const auto Lt = ex.chol_mass.triangularView<Eigen::Lower>();
  for (const auto& K : gp.K) {
    Eigen::MatrixXd X = Lt.solve(K);                       // L^{-1} K
    Eigen::MatrixXd A = Lt.solve(X.transpose()).transpose();  // L^{-1} K L^{-T}
    ex.A.push_back(0.5 * (A + A.transpose()));
  }
  return ex;
}

/// Plain-text expansion format: header "M_x M_A m_xi p" then M_A+1 dense
/// row-major blocks of M_x^2 values.  save/load round-trips bitwise.
inline void save_expansion(const MatrixExpansion& ex, const std::string& path) {
  if (ex.A.empty()) throw std::invalid_argument("save_expansion: empty matrix list");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_expansion: cannot open " + path);
  os.precision(17);
  const int mx = ex.n_dofs();
  os << mx << " " << ex.n_terms() - 1 << " " << ex.m_xi << " " << ex.degree << "\n";
  for (const auto& A : ex.A) {
    for (int i = 0; i < mx; ++i) {
      for (int j = 0; j < mx; ++j) os << A(i, j) << (j + 1 < mx ? " " : "\n");
    }
  }
}

inline MatrixExpansion load_expansion(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_expansion: cannot open " + path);
  int mx = 0, ma = 0, m_xi = 0, p = 0;
  if (!(is >> mx >> ma >> m_xi >> p) || mx <= 0 || ma < 0)
    throw std::runtime_error("load_expansion: malformed header in " + path);
  MatrixExpansion ex;
  ex.m_xi = m_xi;
  ex.degree = p;
  for (int l = 0; l <= ma; ++l) {
    Eigen::MatrixXd A(mx, mx);
    for (int i = 0; i < mx; ++i)
      for (int j = 0; j < mx; ++j)
        if (!(is >> A(i, j)))
          throw std::runtime_error("load_expansion: truncated block " + std::to_string(l));
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::runtime_error("load_expansion: block " + std::to_string(l) + " not symmetric");
    ex.A.push_back(std::move(A));
  }
  return ex;
}

}  // namespace stocheig
