#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rotopt/linalg.hpp"

namespace rotopt {

inline Index sut_length(Index n) { return n * (n - 1) / 2; }

// Position of entry (i, j), i < j, in the row-major strictly-upper ordering.
inline Index sut_index(Index n, Index i, Index j) { return i * (2 * n - i - 1) / 2 + (j - i - 1); }

struct SutVector {
  Index n = 0;
  Vector sigma;

  SutVector() = default;
  SutVector(Index dim, Vector s) : n(dim), sigma(std::move(s)) {
    if (dim < 1 || sigma.size() != sut_length(dim))
      throw Error(ErrorKind::DimensionMismatch, "sigma must have n(n-1)/2 entries");
    if (!sigma.allFinite()) throw Error(ErrorKind::NonFinite, "sigma has non-finite entries");
  }

  static SutVector zero(Index dim) { return SutVector(dim, Vector::Zero(sut_length(dim))); }

  // Infers n from the entry count.
  static SutVector from_entries(const Vector& s) {
    Index dim = 1;
    while (sut_length(dim) < s.size()) ++dim;
    if (sut_length(dim) != s.size()) throw Error(ErrorKind::DimensionMismatch, "entry count is not n(n-1)/2");
    return SutVector(dim, s);
  }

  double operator()(Index i, Index j) const { return sigma(sut_index(n, i, j)); }

  // n x n matrix holding sigma above the diagonal and zeros elsewhere.
  Matrix upper() const {
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) m(i, j) = (*this)(i, j);
    return m;
  }
};

inline SutVector project_sut(const Matrix& x) {
  require_square(x);
  const Index n = x.rows();
  Vector s(sut_length(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) s(sut_index(n, i, j)) = x(i, j);
  return SutVector(n, s);
}

struct SignPattern {
  std::vector<int> rho;

  static SignPattern constant(Index n, int sign) { return {std::vector<int>(n, sign >= 0 ? 1 : -1)}; }

  // Accepts "+-+" or comma separated "1,-1,1".
  static SignPattern parse(const std::string& text) {
    SignPattern p;
    if (text.find(',') == std::string::npos && text.find('1') == std::string::npos) {
      for (char ch : text) {
        if (ch == '+') p.rho.push_back(1);
        else if (ch == '-') p.rho.push_back(-1);
        else if (ch != ' ') throw Error(ErrorKind::Parse, "bad sign pattern '" + text + "'");
      }
    } else {
      std::size_t pos = 0;
      while (pos <= text.size()) {
        const std::size_t next = std::min(text.find(',', pos), text.size());
        const std::string tok = text.substr(pos, next - pos);
        if (tok == "1" || tok == "+1" || tok == "+") p.rho.push_back(1);
        else if (tok == "-1" || tok == "-") p.rho.push_back(-1);
        else throw Error(ErrorKind::Parse, "bad sign pattern '" + text + "'");
        pos = next + 1;
      }
    }
    if (p.rho.empty()) throw Error(ErrorKind::Parse, "empty sign pattern");
    return p;
  }

  Index size() const { return static_cast<Index>(rho.size()); }

  int parity() const {
    int s = 1;
    for (int r : rho) s *= r;
    return s;
  }
};

struct DiagBounds {
  Vector alpha;
  Vector beta;
};

struct ColumnCompletion {
  Vector u_plus;
  Vector u_minus;
};

// Both columns u with [u | u_tilde]^T [u | u_tilde] = gram, given gram22_inv = gram[1:,1:]^{-1}.
inline ColumnCompletion complete_first_column(const Matrix& u_tilde, const Matrix& gram, const Matrix& gram22_inv,
                                              const Tolerances& tol = {}) {
  const Index n = gram.rows();
  if (n < 2 || gram.cols() != n || u_tilde.rows() != n || u_tilde.cols() != n - 1 ||
      gram22_inv.rows() != n - 1 || gram22_inv.cols() != n - 1)
    throw Error(ErrorKind::DimensionMismatch, "complete_first_column: inconsistent shapes");
  if (!u_tilde.allFinite() || !gram.allFinite() || !gram22_inv.allFinite())
    throw Error(ErrorKind::NonFinite, "complete_first_column: non-finite input");

  const double a11 = gram(0, 0);
  const Vector g21 = gram.col(0).tail(n - 1);
  const Vector v = gram22_inv * g21;
  const double schur = a11 - g21.dot(v);
  if (schur <= tol.interior) throw Error(ErrorKind::NotInterior, "Schur complement is not positive");

  const Vector x = u_tilde.row(0).transpose();
  const Vector mx = gram22_inv * x;
  const double denom = 1.0 - x.dot(mx);
  if (denom <= tol.interior) throw Error(ErrorKind::SingularBlock, "lower block of u_tilde is singular");
  const Vector q = mx / denom;

  Vector z(n);
  z(0) = 1.0;
  z.tail(n - 1) = -(u_tilde.bottomRows(n - 1) * q);
  const Vector u0 = u_tilde * v;
  const double t = std::sqrt(schur / z.squaredNorm());
  return {u0 + t * z, u0 - t * z};
}

// All orthogonal matrices sharing the strictly-upper entries sigma, one per sign
// pattern. The Gram chain is computed once; each element then costs O(n^3).
class SutFiber {
 public:
  explicit SutFiber(const SutVector& sigma, const Tolerances& tol = {}) : n_(sigma.n), upper_(sigma.upper()) {
    const Index n = n_;
    levels_.reserve(n > 0 ? n - 1 : 0);
    Matrix g = Matrix::Identity(n, n);
    Matrix minv = Matrix::Identity(n - 1, n - 1);
    for (Index i = 0; i + 1 < n; ++i) {
      const Index m = n - i;
      Level lv;
      const Vector g21 = g.col(0).tail(m - 1);
      lv.v = minv * g21;
      lv.schur = g(0, 0) - g21.dot(lv.v);
      if (lv.schur <= tol.interior) throw Error(ErrorKind::NotInterior, "sigma is not interior (Schur complement)");

      const Vector x = upper_.row(i).tail(m - 1).transpose();
      const Vector mx = minv * x;
      const double denom = 1.0 - x.dot(mx);
      if (denom <= tol.interior) throw Error(ErrorKind::NotInterior, "sigma is not interior (reduced Gram)");
      lv.q = mx / denom;
      levels_.push_back(std::move(lv));

      Matrix g_next = g.bottomRightCorner(m - 1, m - 1) - x * x.transpose();
      if (m - 1 >= 2) {
        const Matrix full_inv = minv + (mx * mx.transpose()) / denom;
        const double p = full_inv(0, 0);
        const Vector qq = full_inv.col(0).tail(m - 2);
        minv = full_inv.bottomRightCorner(m - 2, m - 2) - (qq * qq.transpose()) / p;
      } else {
        minv.resize(0, 0);
      }
      g = std::move(g_next);
    }
    last_ = g(0, 0);
    if (last_ <= tol.interior) throw Error(ErrorKind::NotInterior, "sigma is not interior (last pivot)");
  }

  Index n() const { return n_; }

  Matrix element(const SignPattern& rho) const {
    if (rho.size() != n_) throw Error(ErrorKind::DimensionMismatch, "sign pattern length differs from n");
    const Index n = n_;
    Matrix x = upper_;
    x(n - 1, n - 1) = rho.rho[n - 1] * std::sqrt(last_);
    for (Index i = n - 2; i >= 0; --i) {
      const Index m = n - i;
      const Level& lv = levels_[i];
      const auto ut = x.block(i, i + 1, m, m - 1);
      const Vector u0 = ut * lv.v;
      Vector z(m);
      z(0) = 1.0;
      z.tail(m - 1) = -(x.block(i + 1, i + 1, m - 1, m - 1) * lv.q);
      const double t = std::sqrt(lv.schur / z.squaredNorm());
      x.block(i, i, m, 1) = u0 + rho.rho[i] * t * z;
    }
    return x;
  }

  DiagBounds bounds() const {
    return {element(SignPattern::constant(n_, -1)).diagonal(), element(SignPattern::constant(n_, 1)).diagonal()};
  }

 private:
  struct Level {
    Vector v;
    Vector q;
    double schur = 0.0;
  };

  Index n_;
  Matrix upper_;
  std::vector<Level> levels_;
  double last_ = 1.0;
};

inline Matrix construct_x_rho(const SutVector& sigma, const SignPattern& rho, const Tolerances& tol = {}) {
  return SutFiber(sigma, tol).element(rho);
}

inline DiagBounds diag_bounds(const SutVector& sigma, const Tolerances& tol = {}) {
  return SutFiber(sigma, tol).bounds();
}

// Element k uses rho_i = -1 exactly when bit i of k is set.
inline std::vector<Matrix> fiber_enumerate(const SutVector& sigma, const Tolerances& tol = {}) {
  if (sigma.n > 12) throw Error(ErrorKind::DimensionTooLarge, "fiber_enumerate supports n <= 12");
  const SutFiber fiber(sigma, tol);
  const Index n = sigma.n;
  std::vector<Matrix> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
    SignPattern rho = SignPattern::constant(n, 1);
    for (Index i = 0; i < n; ++i)
      if (k >> i & 1u) rho.rho[i] = -1;
    out.push_back(fiber.element(rho));
  }
  return out;
}

struct SutOptimum {
  Matrix x;
  double value = 0.0;
  SignPattern rho;
  // Filled by sut_opt_special only.
  double relaxation = 0.0;
  double min_relaxation = 0.0;
  double gap_bound = 0.0;
  Index flipped = -1;
};

namespace detail {

inline void require_diag_length(const SutVector& sigma, const Vector& a) {
  if (a.size() != sigma.n) throw Error(ErrorKind::DimensionMismatch, "a_diag length differs from n");
  if (!a.allFinite()) throw Error(ErrorKind::NonFinite, "a_diag has non-finite entries");
}

inline SignPattern greedy_signs(const Vector& a) {
  SignPattern rho = SignPattern::constant(a.size(), 1);
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) < 0) rho.rho[i] = -1;
  return rho;
}

}  // namespace detail

// max <Diag(a), X> over O(n) with the given strictly-upper entries.
inline SutOptimum sut_opt_orth(const SutVector& sigma, const Vector& a, const Tolerances& tol = {}) {
  detail::require_diag_length(sigma, a);
  const SutFiber fiber(sigma, tol);
  SutOptimum r;
  r.rho = detail::greedy_signs(a);
  r.x = fiber.element(r.rho);
  r.value = a.dot(r.x.diagonal());
  r.relaxation = r.value;
  return r;
}

// Same over SO(n): when the greedy pattern has odd parity, flip its cheapest coordinate.
inline SutOptimum sut_opt_special(const SutVector& sigma, const Vector& a, const Tolerances& tol = {}) {
  detail::require_diag_length(sigma, a);
  const SutFiber fiber(sigma, tol);
  const DiagBounds b = fiber.bounds();
  const Index n = sigma.n;
  SutOptimum r;
  r.rho = detail::greedy_signs(a);
  for (Index i = 0; i < n; ++i) {
    r.relaxation += std::max(a(i) * b.alpha(i), a(i) * b.beta(i));
    r.min_relaxation += std::min(a(i) * b.alpha(i), a(i) * b.beta(i));
  }
  if (r.rho.parity() < 0) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double cost = std::abs(a(i)) * (b.beta(i) - b.alpha(i));
      if (cost < best) {
        best = cost;
        r.flipped = i;
      }
    }
    r.rho.rho[r.flipped] = -r.rho.rho[r.flipped];
  }
  r.x = fiber.element(r.rho);
  r.value = a.dot(r.x.diagonal());
  r.gap_bound = r.relaxation - r.value;
  return r;
}

struct LowRankReduction {
  Matrix u;
  Matrix v;
};

namespace detail {

// Rotate rows p and r of q so that y_r becomes zero (y_p takes the norm).
inline void zero_into(Matrix& q, Vector& y, Index p, Index r) {
  const double h = std::hypot(y(p), y(r));
  if (y(r) == 0.0 || h == 0.0) return;
  const double c = y(p) / h, s = y(r) / h;
  const Eigen::RowVectorXd qp = q.row(p), qr = q.row(r);
  q.row(p) = c * qp + s * qr;
  q.row(r) = -s * qp + c * qr;
  y(p) = h;
  y(r) = 0.0;
}

}  // namespace detail

// U, V in SO(n) with supp(U u_i) in [0, i] and supp(V v_i) in [i+1, n-1], built from Givens rotations.
inline LowRankReduction reduce_low_rank(const std::vector<Vector>& us, const std::vector<Vector>& vs,
                                        double tol = 1e-12) {
  if (us.empty() || us.size() != vs.size()) throw Error(ErrorKind::DimensionMismatch, "need equally many u and v");
  const Index n = us.front().size();
  const Index k = static_cast<Index>(us.size());
  if (k > n - 1) throw Error(ErrorKind::TooManyVectors, "at most n-1 vector pairs are supported");
  for (Index i = 0; i < k; ++i) {
    if (us[i].size() != n || vs[i].size() != n) throw Error(ErrorKind::DimensionMismatch, "vector length differs");
    if (!us[i].allFinite() || !vs[i].allFinite()) throw Error(ErrorKind::NonFinite, "non-finite vector");
  }
  LowRankReduction r{Matrix::Identity(n, n), Matrix::Identity(n, n)};
  for (Index i = 0; i < k; ++i) {
    Vector y = r.u * us[i];
    for (Index row = n - 1; row > i; --row) detail::zero_into(r.u, y, i, row);
  }
  for (Index i = k - 1; i >= 0; --i) {
    Vector y = r.v * vs[i];
    for (Index row = 0; row <= i; ++row) detail::zero_into(r.v, y, i + 1, row);
  }
  for (Index i = 0; i < k; ++i) {
    const Vector a = r.u * us[i], b = r.v * vs[i];
    const double sa = tol * std::max(1.0, us[i].norm()), sb = tol * std::max(1.0, vs[i].norm());
    if ((a.tail(n - i - 1).cwiseAbs().array() > sa).any() || (b.head(i + 1).cwiseAbs().array() > sb).any())
      throw Error(ErrorKind::RankDeficient, "support pattern could not be established");
  }
  return r;
}

// u^T X v = target.
struct RankOneConstraint {
  Vector u;
  Vector v;
  double target = 0.0;
};

struct LowRankFeasibility {
  bool found = false;
  Matrix x;
  double residual = std::numeric_limits<double>::infinity();
  long iterations = 0;
  Matrix u;
  Matrix v;
};

inline double constraint_residual(const std::vector<RankOneConstraint>& cs, const Matrix& x) {
  double worst = 0.0;
  for (const auto& c : cs)
    worst = std::max(worst, std::abs(c.u.dot(x * c.v) - c.target) / (c.u.norm() * c.v.norm()));
  return worst;
}

// Finds X in SO(n) with u_i^T X v_i = t_i up to eps (relative to |u_i||v_i|) or reports NotFound.
inline LowRankFeasibility feasibility_low_rank(const std::vector<RankOneConstraint>& cs, double eps,
                                               long max_iter = 100000, const Tolerances& tol = {}) {
  if (cs.empty()) throw Error(ErrorKind::InvalidArgument, "no constraints given");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  const Index n = cs.front().u.size();
  for (const auto& c : cs) {
    if (c.u.size() != n || c.v.size() != n) throw Error(ErrorKind::DimensionMismatch, "vector length differs");
    if (!c.u.allFinite() || !c.v.allFinite() || !std::isfinite(c.target))
      throw Error(ErrorKind::NonFinite, "non-finite constraint");
    if (c.u.norm() == 0.0 || c.v.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "zero constraint vector");
  }

  LowRankFeasibility res;
  bool upper_already = true;
  for (const auto& c : cs)
    for (Index i = 0; i < n && upper_already; ++i)
      for (Index j = 0; j <= i; ++j)
        if (c.u(i) * c.v(j) != 0.0) {
          upper_already = false;
          break;
        }
  if (upper_already) {
    res.u = Matrix::Identity(n, n);
    res.v = Matrix::Identity(n, n);
  } else {
    std::vector<Vector> us, vs;
    for (const auto& c : cs) {
      us.push_back(c.u);
      vs.push_back(c.v);
    }
    const LowRankReduction red = reduce_low_rank(us, vs);
    res.u = red.u;
    res.v = red.v;
  }

  // Constraints on the strictly-upper coordinates of Y = U X V^T, scaled to unit norm.
  const Index k = static_cast<Index>(cs.size()), N = sut_length(n);
  Matrix C(k, N);
  Vector t(k);
  for (Index r = 0; r < k; ++r) {
    const Vector a = res.u * cs[r].u, b = res.v * cs[r].v;
    const double scale = cs[r].u.norm() * cs[r].v.norm();
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) C(r, sut_index(n, i, j)) = a(i) * b(j) / scale;
    t(r) = cs[r].target / scale;
  }
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(C * C.transpose());

  auto sut_of = [&](const Matrix& y) { return project_sut(y).sigma; };
  auto affine = [&](Matrix y) {
    const Vector s = sut_of(y);
    const Vector s2 = s - C.transpose() * cod.solve(C * s - t);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) y(i, j) = s2(sut_index(n, i, j));
    return y;
  };
  auto resid = [&](const Matrix& y) { return (C * sut_of(y) - t).cwiseAbs().maxCoeff(); };

  // Dykstra between the affine set and the operator-norm ball. Feasible instances can crawl,
  // so NotFound is declared only once the residual stops improving.
  Matrix x = affine(Matrix::Zero(n, n));
  Matrix p = Matrix::Zero(n, n);
  Matrix y = project_op_ball(x);
  bool ok = false;
  double best = std::numeric_limits<double>::infinity();
  long best_it = 0;
  constexpr long plateau = 200;
  for (long it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    y = project_op_ball(x + p);
    p = x + p - y;
    const double r = resid(y);
    if (r <= 0.5 * eps) {
      ok = true;
      break;
    }
    if (r < (1.0 - 1e-3) * best) {
      best = r;
      best_it = it;
    }
    x = affine(y);
    if (it - best_it > plateau) break;
  }
  if (!ok) return res;

  const SutVector sigma(n, (1.0 - eps) * sut_of(y));
  Matrix xy;
  try {
    xy = construct_x_rho(sigma, SignPattern::constant(n, 1), tol);
  } catch (const Error&) {
    return res;
  }
  res.x = res.u.transpose() * xy * res.v;
  res.residual = constraint_residual(cs, res.x);
  res.found = true;
  return res;
}

}  // namespace rotopt
