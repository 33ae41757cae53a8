#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace stocheig {

/// Per-variable polynomial degrees of one multivariate Hermite polynomial.
using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

/// Number of multi-indices in m variables with total degree <= p,
/// i.e. (m+p)! / (m! p!).
inline std::int64_t basis_count(int m_xi, int p) {
  std::int64_t n = 1;
  for (int i = 1; i <= p; ++i) n = n * (m_xi + i) / i;
  return n;
}

/// Value of the orthonormal probabilists' Hermite polynomial h_n(x),
/// normalized so that E[h_i h_j] = delta_ij under the standard normal
/// measure.  Three-term recurrence h_{n+1} = (x h_n - sqrt(n) h_{n-1}) / sqrt(n+1).
inline double hermite_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_eval: negative degree");
  if (n == 0) return 1.0;
  double hm = 1.0, h = x;
  for (int k = 1; k < n; ++k) {
    const double hn = (x * h - std::sqrt(double(k)) * hm) / std::sqrt(double(k + 1));
    hm = h;
    h = hn;
  }
  return h;
}

/// Values h_0(x) .. h_nmax(x) in one sweep of the recurrence.
inline Eigen::VectorXd hermite_eval_all(int nmax, double x) {
  Eigen::VectorXd h(nmax + 1);
  h[0] = 1.0;
  if (nmax >= 1) h[1] = x;
  for (int k = 1; k < nmax; ++k)
    h[k + 1] = (x * h[k] - std::sqrt(double(k)) * h[k - 1]) / std::sqrt(double(k + 1));
  return h;
}

/// Multivariate orthonormal Hermite chaos basis: the graded-lexicographic
/// list of multi-indices of total degree <= p in m_xi variables.
///
/// Ordering: grouped by total degree (all-zeros first); within a degree,
/// lexicographically descending, so for m_xi=3, degree 2 the order is
/// (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).  The ordering is
/// nested: the first basis_count(m,q) indices of a degree-p basis (q <= p)
/// form the degree-q basis.
class GpcBasis {
 public:
  GpcBasis(int m_xi, int p) : m_xi_(m_xi), degree_(p) {
    if (m_xi < 1) throw std::invalid_argument("GpcBasis: m_xi must be >= 1");
    if (p < 0) throw std::invalid_argument("GpcBasis: degree must be >= 0");
    MultiIndex head(m_xi, 0);
    for (int d = 0; d <= p; ++d) emit(head, 0, d);
  }

  int m_xi() const { return m_xi_; }
  int degree() const { return degree_; }
  int size() const { return int(indices_.size()); }
  const MultiIndex& index(int ell) const { return indices_.at(ell); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  int total_degree_of(int ell) const { return total_degree(indices_.at(ell)); }

  /// psi_ell(xi) = prod_j h_{alpha_j}(xi_j).
  double eval(int ell, const Eigen::VectorXd& xi) const {
    check(ell, xi);
    const MultiIndex& a = indices_[ell];
    double v = 1.0;
    for (int j = 0; j < m_xi_; ++j)
      if (a[j] > 0) v *= hermite_eval(a[j], xi[j]);
    return v;
  }

  /// All basis values psi_0(xi) .. psi_{M}(xi); shares the univariate
  /// recurrences across indices.
  Eigen::VectorXd eval_all(const Eigen::VectorXd& xi) const {
    check(0, xi);
    Eigen::MatrixXd h(degree_ + 1, m_xi_);
    for (int j = 0; j < m_xi_; ++j) h.col(j) = hermite_eval_all(degree_, xi[j]);
    Eigen::VectorXd out(size());
    for (int ell = 0; ell < size(); ++ell) {
      double v = 1.0;
      const MultiIndex& a = indices_[ell];
      for (int j = 0; j < m_xi_; ++j) v *= h(a[j], j);
      out[ell] = v;
    }
    return out;
  }

 private:
  void emit(MultiIndex& cur, int pos, int remaining) {
    if (pos == m_xi_ - 1) {
      cur[pos] = remaining;
      indices_.push_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      emit(cur, pos + 1, remaining - v);
    }
    cur[pos] = 0;
  }

  void check(int ell, const Eigen::VectorXd& xi) const {
    if (ell < 0 || ell >= size()) throw std::out_of_range("GpcBasis: index out of range");
    if (int(xi.size()) != m_xi_) throw std::invalid_argument("GpcBasis: point dimension mismatch");
  }

  int m_xi_;
  int degree_;
  std::vector<MultiIndex> indices_;
};

inline GpcBasis gen_multi_indices(int m_xi, int p) { return GpcBasis(m_xi, p); }

}  // namespace stocheig
