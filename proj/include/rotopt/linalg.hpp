#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rotopt/error.hpp"

namespace rotopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerances {
  double orth = 1e-9;
  double recon = 1e-9;
  double feas = 1e-8;
  double interior = 1e-10;
};

inline void require_finite(const Matrix& m, const char* what = "matrix") {
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

inline void require_square(const Matrix& m, const char* what = "matrix") {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square and nonempty");
}

// Sign of det(m) read off an LU factorization, so it survives under/overflow of the
// determinant itself. Exactly singular input reports +1.
inline int det_sign(const Matrix& m) {
  Eigen::PartialPivLU<Matrix> lu(m);
  int s = lu.permutationP().determinant() > 0 ? 1 : -1;
  const auto d = lu.matrixLU().diagonal();
  for (Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) return 1;
    if (d(i) < 0.0) s = -s;
  }
  return s;
}

struct SvdResult {
  Matrix u;
  Vector sigma;
  Matrix v;
  int det_sign = 1;
};

inline SvdResult svd(const Matrix& m) {
  require_finite(m);
  require_square(m);
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r;
  r.u = dec.matrixU();
  r.v = dec.matrixV();
  r.sigma = dec.singularValues();
  r.det_sign = det_sign(r.u) * det_sign(r.v);
  return r;
}

struct TraceMax {
  double value = 0.0;
  Matrix argmax;
};

inline TraceMax special_trace(const Matrix& m) {
  const SvdResult s = svd(m);
  const Index n = m.rows();
  Vector d = Vector::Ones(n);
  d(n - 1) = s.det_sign;
  TraceMax r;
  r.value = s.sigma.head(n - 1).sum() + s.det_sign * s.sigma(n - 1);
  r.argmax = s.u * d.asDiagonal() * s.v.transpose();
  return r;
}

// Value of special_trace without forming the singular vectors.
inline double special_trace_value(const Matrix& m) {
  require_finite(m);
  require_square(m);
  Eigen::BDCSVD<Matrix> dec(m);
  const Vector& s = dec.singularValues();
  const Index n = m.rows();
  double v = s.sum();
  if (det_sign(m) < 0) v -= 2.0 * s(n - 1);
  return v;
}

inline TraceMax orth_trace_max(const Matrix& m) {
  const SvdResult s = svd(m);
  return {s.sigma.sum(), s.u * s.v.transpose()};
}

inline double trace_norm(const Matrix& m) {
  require_finite(m);
  require_square(m);
  return Eigen::BDCSVD<Matrix>(m).singularValues().sum();
}

inline double op_norm(const Matrix& m) {
  require_finite(m);
  require_square(m);
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

// Block-diagonal rotation with 2x2 blocks [[cos, sin], [-sin, cos]]; odd n starts with a 1.
inline Matrix torus_matrix(Index n, const std::vector<double>& thetas) {
  if (n < 1 || static_cast<Index>(thetas.size()) != n / 2)
    throw Error(ErrorKind::DimensionMismatch, "torus_matrix needs floor(n/2) angles");
  Matrix r = Matrix::Identity(n, n);
  const Index off = n % 2;
  for (Index p = 0; p < n / 2; ++p) {
    const Index i = off + 2 * p;
    const double c = std::cos(thetas[p]), s = std::sin(thetas[p]);
    r(i, i) = c;
    r(i, i + 1) = s;
    r(i + 1, i) = -s;
    r(i + 1, i + 1) = c;
  }
  return r;
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = nd(rng);
  return g;
}

inline Matrix random_rotation(Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "n must be positive");
  std::mt19937_64 rng(seed);
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (det_sign(q) < 0) q.col(0) = -q.col(0);
  return q;
}

inline Matrix project_op_ball(const Matrix& m) {
  const SvdResult s = svd(m);
  const Vector clipped = s.sigma.cwiseMin(1.0);
  return s.u * clipped.asDiagonal() * s.v.transpose();
}

enum class Group { SO, O, Bop };

inline bool membership(const Matrix& m, Group which, double tol) {
  require_finite(m);
  require_square(m);
  if (which == Group::Bop) return op_norm(m) <= 1.0 + tol;
  const Index n = m.rows();
  const double err = (m.transpose() * m - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > tol) return false;
  if (which == Group::O) return true;
  return det_sign(m) > 0;
}

inline double orthogonality_error(const Matrix& m) {
  const Index n = m.rows();
  return (m.transpose() * m - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

// Identity except G(i,i)=G(j,j)=c, G(i,j)=s, G(j,i)=-s.
struct PlanarRotation {
  Index i = 0;
  Index j = 1;
  double c = 1.0;
  double s = 0.0;

  Matrix matrix(Index n) const {
    Matrix g = Matrix::Identity(n, n);
    g(i, i) = c;
    g(j, j) = c;
    g(i, j) = s;
    g(j, i) = -s;
    return g;
  }

  // m <- G^T m G, touching two rows and two columns.
  void conjugate(Matrix& m) const {
    for (Index r = 0; r < m.rows(); ++r) {
      const double a = m(r, i), b = m(r, j);
      m(r, i) = c * a - s * b;
      m(r, j) = s * a + c * b;
    }
    for (Index k = 0; k < m.cols(); ++k) {
      const double a = m(i, k), b = m(j, k);
      m(i, k) = c * a - s * b;
      m(j, k) = s * a + c * b;
    }
  }
};

}  // namespace rotopt
