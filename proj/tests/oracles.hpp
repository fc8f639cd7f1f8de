#pragma once

// Independent brute-force references used by the unit and acceptance tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Columns are the +-1 vectors with an even number of -1 entries.
inline Matrix even_sign_vertices(int n) {
  std::vector<Vector> vs;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) % 2) continue;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = (mask >> i & 1u) ? -1.0 : 1.0;
    vs.push_back(v);
  }
  Matrix m(n, static_cast<Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) m.col(static_cast<Index>(k)) = vs[k];
  return m;
}

// Phase-one simplex with Bland's rule: is there lambda >= 0 with A lambda = b?
inline bool lp_feasible(Matrix A, Vector b, double tol = 1e-9) {
  const Index m = A.rows(), n = A.cols();
  for (Index i = 0; i < m; ++i)
    if (b(i) < 0) {
      A.row(i) *= -1.0;
      b(i) = -b(i);
    }
  // Tableau [A | I | b] with artificial basis; objective row minimizes the artificial sum.
  Matrix t = Matrix::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = A;
  t.block(0, n, m, m) = Matrix::Identity(m, m);
  t.col(n + m).head(m) = b;
  t.block(m, n, 1, m).setOnes();
  for (Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  std::vector<Index> basis(m);
  for (Index i = 0; i < m; ++i) basis[i] = n + i;
  for (int iter = 0; iter < 10000; ++iter) {
    Index enter = -1;
    for (Index j = 0; j < n + m; ++j)
      if (t(m, j) < -1e-12) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Index leave = -1;
    double best = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (t(i, enter) <= 1e-12) continue;
      const double r = t(i, n + m) / t(i, enter);
      if (leave < 0 || r < best - 1e-15 || (std::abs(r - best) <= 1e-15 && basis[i] < basis[leave])) {
        leave = i;
        best = r;
      }
    }
    if (leave < 0) break;
    t.row(leave) /= t(leave, enter);
    for (Index i = 0; i <= m; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[leave] = enter;
  }
  return -t(m, n + m) <= tol;
}

// Membership in the convex hull of the columns of V.
inline bool in_hull(const Matrix& V, const Vector& d, double tol = 1e-9) {
  Matrix A(V.rows() + 1, V.cols());
  A.topRows(V.rows()) = V;
  A.row(V.rows()).setOnes();
  Vector b(V.rows() + 1);
  b.head(V.rows()) = d;
  b(V.rows()) = 1.0;
  return lp_feasible(A, b, tol);
}

inline double vertex_max(const Matrix& V, const Vector& w) {
  double best = -INFINITY;
  for (Index k = 0; k < V.cols(); ++k) best = std::max(best, w.dot(V.col(k)));
  return best;
}

inline Eigen::Matrix3d euler_zyz(double a, double b, double g) {
  return (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(b, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(g, Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

// max <A,R> subject to <B,R> in [lo,hi] over R = Rz(a) Ry(b) Rz(g), by a coarse grid
// followed by nested local grids around the best candidates down to `final_step` radians.
inline double euler_grid_max(const Eigen::Matrix3d& A, const Eigen::Matrix3d& B, double lo, double hi,
                             double final_step = 1e-4, int coarse = 64, int keep = 24) {
  struct Cand {
    double val, a, b, g;
  };
  std::vector<Cand> cands;
  const double ha = 2.0 * M_PI / coarse, hb = M_PI / (coarse / 2), hg = 2.0 * M_PI / coarse;
  for (int i = 0; i < coarse; ++i)
    for (int j = 0; j <= coarse / 2; ++j)
      for (int k = 0; k < coarse; ++k) {
        const double a = i * ha, b = j * hb, g = k * hg;
        const Eigen::Matrix3d r = euler_zyz(a, b, g);
        const double bv = (B.array() * r.array()).sum();
        if (bv < lo || bv > hi) continue;
        cands.push_back({(A.array() * r.array()).sum(), a, b, g});
      }
  if (cands.empty()) return -INFINITY;
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.val > y.val; });
  std::vector<Cand> seeds;
  for (const auto& c : cands) {
    bool near = false;
    for (const auto& s : seeds)
      if (std::abs(c.a - s.a) < 2.5 * ha && std::abs(c.b - s.b) < 2.5 * hb && std::abs(c.g - s.g) < 2.5 * hg) near = true;
    if (!near) seeds.push_back(c);
    if (static_cast<int>(seeds.size()) >= keep) break;
  }
  double best = cands.front().val;
  for (Cand s : seeds) {
    double step = std::max(ha, hb);
    while (step > final_step) {
      Cand nb = s;
      for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j)
          for (int k = -5; k <= 5; ++k) {
            const double a = s.a + i * step * 0.4, b = s.b + j * step * 0.4, g = s.g + k * step * 0.4;
            const Eigen::Matrix3d r = euler_zyz(a, b, g);
            const double bv = (B.array() * r.array()).sum();
            if (bv < lo || bv > hi) continue;
            const double v = (A.array() * r.array()).sum();
            if (v > nb.val) nb = {v, a, b, g};
          }
      s = nb;
      step *= 0.4;
    }
    best = std::max(best, s.val);
  }
  return best;
}

}  // namespace oracle
