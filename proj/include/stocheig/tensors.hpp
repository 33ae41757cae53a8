#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stocheig/multi_index.hpp"

namespace stocheig {

namespace detail {

// exact integer factorials as doubles (n <= 18 stays exact in double)
inline double fact(int n) {
  static const double table[] = {1., 1., 2., 6., 24., 120., 720., 5040., 40320.,
                                 362880., 3628800., 39916800., 479001600.,
                                 6227020800., 87178291200., 1307674368000.,
                                 20922789888000., 355687428096000., 6402373705728000.};
  if (n < 0) return 0.0;
  if (n < 19) return table[n];
  double v = table[18];
  for (int i = 19; i <= n; ++i) v *= double(i);
  return v;
}

/// E[h_a h_b h_c] for orthonormal probabilists' Hermite polynomials:
/// sqrt(a! b! c!) / ((s-a)! (s-b)! (s-c)!) when a+b+c = 2s is even and
/// the triangle inequality holds, else 0.
inline double hermite_triple(int a, int b, int c) {
  const int t = a + b + c;
  if (t % 2) return 0.0;
  const int s = t / 2;
  if (s < a || s < b || s < c) return 0.0;
  return std::sqrt(fact(a) * fact(b) * fact(c)) / (fact(s - a) * fact(s - b) * fact(s - c));
}

/// E[h_a h_b h_c h_d] by linearizing h_a h_b = sum_e E[h_a h_b h_e] h_e.
inline double hermite_quad(int a, int b, int c, int d) {
  double v = 0.0;
  for (int e = std::abs(a - b); e <= a + b; e += 2) {
    const double t1 = hermite_triple(a, b, e);
    if (t1 != 0.0) v += t1 * hermite_triple(e, c, d);
  }
  return v;
}

}  // namespace detail

/// Sparse expectation tensor c_{ljk} = E[psi_l psi_j psi_k], l over the
/// operator basis (degree 2p), j,k over the solution basis (degree p).
/// Entries below the drop tolerance 1e-12 are omitted; the stored entries
/// are exact rational-rooted values, so the tolerance only absorbs roundoff.
/// Immutable after construction; entries sorted by (l, j, k).
class TripleTensor {
 public:
  struct Entry {
    int l, j, k;
    double value;
  };

  TripleTensor() = default;
  TripleTensor(int dim_l, int dim_jk, std::vector<Entry> entries)
      : dim_l_(dim_l), dim_jk_(dim_jk), entries_(std::move(entries)) {}

  int dim_l() const { return dim_l_; }
  int dim_jk() const { return dim_jk_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  void save_coordinate_text(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("TripleTensor: cannot open " + path);
    os.precision(17);
    for (const auto& e : entries_) os << e.l << " " << e.j << " " << e.k << " " << e.value << "\n";
  }

 private:
  int dim_l_ = 0, dim_jk_ = 0;
  std::vector<Entry> entries_;
};

/// Sparse c_{lijk} = E[psi_l psi_i psi_j psi_k]; l,k over the operator
/// basis, i,j over the solution basis.
class QuadTensor {
 public:
  struct Entry {
    int l, i, j, k;
    double value;
  };

  QuadTensor() = default;
  QuadTensor(int dim_l, int dim_ij, int dim_k, std::vector<Entry> entries)
      : dim_l_(dim_l), dim_ij_(dim_ij), dim_k_(dim_k), entries_(std::move(entries)) {}

  int dim_l() const { return dim_l_; }
  int dim_ij() const { return dim_ij_; }
  int dim_k() const { return dim_k_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  void save_coordinate_text(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("QuadTensor: cannot open " + path);
    os.precision(17);
    for (const auto& e : entries_)
      os << e.l << " " << e.i << " " << e.j << " " << e.k << " " << e.value << "\n";
  }

 private:
  int dim_l_ = 0, dim_ij_ = 0, dim_k_ = 0;
  std::vector<Entry> entries_;
};

constexpr double kTensorDropTol = 1e-12;

/// c_{ljk} from the analytic univariate triple-product formula, one factor
/// per variable.
inline TripleTensor triple_tensor(const GpcBasis& basis_A, const GpcBasis& basis_sol) {
  if (basis_A.m_xi() != basis_sol.m_xi())
    throw std::invalid_argument("triple_tensor: basis dimension mismatch");
  const int m = basis_A.m_xi();
  std::vector<TripleTensor::Entry> ent;
  for (int l = 0; l < basis_A.size(); ++l) {
    const MultiIndex& al = basis_A.index(l);
    for (int j = 0; j < basis_sol.size(); ++j) {
      const MultiIndex& aj = basis_sol.index(j);
      for (int k = 0; k < basis_sol.size(); ++k) {
        const MultiIndex& ak = basis_sol.index(k);
        double v = 1.0;
        for (int d = 0; d < m; ++d) {
          v *= detail::hermite_triple(al[d], aj[d], ak[d]);
          if (v == 0.0) break;
        }
        if (std::abs(v) > kTensorDropTol) ent.push_back({l, j, k, v});
      }
    }
  }
  return TripleTensor(basis_A.size(), basis_sol.size(), std::move(ent));
}

/// c_{lijk} with quartic exactness, via pairwise linearization per variable.
inline QuadTensor quad_tensor(const GpcBasis& basis_A, const GpcBasis& basis_sol) {
  if (basis_A.m_xi() != basis_sol.m_xi())
    throw std::invalid_argument("quad_tensor: basis dimension mismatch");
  const int m = basis_A.m_xi();
  std::vector<QuadTensor::Entry> ent;
  for (int l = 0; l < basis_A.size(); ++l) {
    const MultiIndex& al = basis_A.index(l);
    for (int i = 0; i < basis_sol.size(); ++i) {
      const MultiIndex& ai = basis_sol.index(i);
      for (int j = 0; j < basis_sol.size(); ++j) {
        const MultiIndex& aj = basis_sol.index(j);
        for (int k = 0; k < basis_A.size(); ++k) {
          const MultiIndex& ak = basis_A.index(k);
          double v = 1.0;
          for (int d = 0; d < m; ++d) {
            v *= detail::hermite_quad(al[d], ai[d], aj[d], ak[d]);
            if (v == 0.0) break;
          }
          if (std::abs(v) > kTensorDropTol) ent.push_back({l, i, j, k, v});
        }
      }
    }
  }
  return QuadTensor(basis_A.size(), basis_sol.size(), basis_A.size(), std::move(ent));
}

}  // namespace stocheig
