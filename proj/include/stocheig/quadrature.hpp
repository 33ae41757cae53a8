#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stocheig {

/// Quadrature rule in R^{m_xi} against the standard normal product measure.
/// Weights sum to 1; Smolyak weights may be negative.
struct QuadGrid {
  Eigen::MatrixXd points;   // (n_points, m_xi)
  Eigen::VectorXd weights;  // (n_points)
  std::string meta;         // construction descriptor

  int size() const { return int(points.rows()); }
  int dim() const { return int(points.cols()); }
  Eigen::VectorXd point(int q) const { return points.row(q).transpose(); }

  void save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("QuadGrid: cannot open " + path);
    for (int j = 0; j < dim(); ++j) os << "xi_" << j + 1 << ",";
    os << "weight\n";
    os.precision(17);
    for (int q = 0; q < size(); ++q) {
      for (int j = 0; j < dim(); ++j) os << points(q, j) << ",";
      os << weights[q] << "\n";
    }
  }
};

/// n-point Gauss-Hermite rule for the standard normal weight, via the
/// eigen-decomposition of the Jacobi matrix (offdiagonal sqrt(k)).
/// Exact for polynomials of degree <= 2n-1.  Nodes are symmetrized and
/// the weights renormalized so that sum w = 1 exactly up to roundoff.
inline QuadGrid gauss_hermite_1d(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_1d: n must be >= 1");
  QuadGrid g;
  g.points.resize(n, 1);
  g.weights.resize(n);
  g.meta = "gauss_hermite_1d(" + std::to_string(n) + ")";
  if (n == 1) {
    g.points(0, 0) = 0.0;
    g.weights[0] = 1.0;
    return g;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = es.eigenvalues();          // ascending
  Eigen::VectorXd w = es.eigenvectors().row(0).transpose().array().square();
  // enforce exact +/- symmetry of the rule
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -m;
    x[n - 1 - i] = m;
    const double wm = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = w[n - 1 - i] = wm;
  }
  if (n % 2) x[n / 2] = 0.0;
  w /= w.sum();
  g.points.col(0) = x;
  g.weights = w;
  return g;
}

/// Cartesian product of 1D rules: product points, product weights.
inline QuadGrid tensor_grid(const std::vector<QuadGrid>& rules) {
  if (rules.empty()) throw std::invalid_argument("tensor_grid: need at least one rule");
  const int d = int(rules.size());
  std::int64_t n = 1;
  for (const auto& r : rules) n *= r.size();
  QuadGrid g;
  g.points.resize(n, d);
  g.weights.resize(n);
  g.meta = "tensor_grid(d=" + std::to_string(d) + ")";
  std::vector<int> idx(d, 0);
  for (std::int64_t q = 0; q < n; ++q) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      g.points(q, j) = rules[j].points(idx[j], 0);
      w *= rules[j].weights[idx[j]];
    }
    g.weights[q] = w;
    for (int j = d - 1; j >= 0; --j) {
      if (++idx[j] < rules[j].size()) break;
      idx[j] = 0;
    }
  }
  return g;
}

/// Full tensor Gauss-Hermite grid with n points per dimension.
inline QuadGrid tensor_gauss_hermite(int m_xi, int n) {
  return tensor_grid(std::vector<QuadGrid>(m_xi, gauss_hermite_1d(n)));
}

namespace detail {
inline std::int64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t v = 1;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}
}  // namespace detail

/// Smolyak sparse Gauss-Hermite grid with linear growth (1D rule i uses i
/// points), combining tensor rules over multi-levels m_xi <= |i| <= m_xi+k-1.
/// Duplicate points are merged by coordinate quantization at 1e-12 and the
/// final point list is sorted lexicographically, so reconstruction is
/// bitwise reproducible.  (m_xi=3, level 4) has 69 points and integrates
/// total degree <= 2k-1 exactly.
inline QuadGrid smolyak(int m_xi, int level) {
  if (m_xi < 1 || level < 1) throw std::invalid_argument("smolyak: need m_xi, level >= 1");
  const int q = m_xi + level - 1;
  std::vector<QuadGrid> rules1d;
  for (int i = 1; i <= q; ++i) rules1d.push_back(gauss_hermite_1d(i));

  const double scale = 1e12;  // merge tolerance 1e-12
  std::map<std::vector<std::int64_t>, std::pair<Eigen::VectorXd, double>> merged;

  std::vector<int> lv(m_xi, 1);
  while (true) {
    int s = 0;
    for (int v : lv) s += v;
    if (s <= q) {
      const std::int64_t cmb = detail::binom(m_xi - 1, q - s);
      if (cmb != 0) {
        const double coef = ((q - s) % 2 ? -1.0 : 1.0) * double(cmb);
        std::vector<int> idx(m_xi, 0);
        while (true) {
          Eigen::VectorXd pt(m_xi);
          double w = coef;
          for (int j = 0; j < m_xi; ++j) {
            pt[j] = rules1d[lv[j] - 1].points(idx[j], 0);
            w *= rules1d[lv[j] - 1].weights[idx[j]];
          }
          std::vector<std::int64_t> key(m_xi);
          for (int j = 0; j < m_xi; ++j) key[j] = std::llround(pt[j] * scale);
          auto it = merged.find(key);
          if (it == merged.end())
            merged.emplace(key, std::make_pair(pt, w));
          else
            it->second.second += w;
          int j = m_xi - 1;
          for (; j >= 0; --j) {
            if (++idx[j] < lv[j]) break;
            idx[j] = 0;
          }
          if (j < 0) break;
        }
      }
    }
    // next level multi-index with entries in [1, q]
    int j = m_xi - 1;
    for (; j >= 0; --j) {
      if (++lv[j] <= q) break;
      lv[j] = 1;
    }
    if (j < 0) break;
  }

  QuadGrid g;
  g.points.resize(int(merged.size()), m_xi);
  g.weights.resize(int(merged.size()));
  g.meta = "smolyak(m=" + std::to_string(m_xi) + ",level=" + std::to_string(level) + ")";
  int r = 0;
  for (const auto& [key, pw] : merged) {  // std::map: lexicographic key order
    g.points.row(r) = pw.first.transpose();
    g.weights[r] = pw.second;
    ++r;
  }
  return g;
}

}  // namespace stocheig
