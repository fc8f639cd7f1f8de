#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "rotopt/linalg.hpp"
#include "rotopt/parity_polytope.hpp"

namespace rotopt {

inline bool majorizes(const Vector& c, const Vector& d, double tol = 1e-8) {
  if (c.size() != d.size()) throw Error(ErrorKind::DimensionMismatch, "majorizes: length mismatch");
  if (!c.allFinite() || !d.allFinite()) throw Error(ErrorKind::NonFinite, "majorizes: non-finite input");
  std::vector<double> cs(c.data(), c.data() + c.size()), ds(d.data(), d.data() + d.size());
  std::sort(cs.begin(), cs.end(), std::greater<>());
  std::sort(ds.begin(), ds.end(), std::greater<>());
  const double scale = std::max({1.0, c.cwiseAbs().maxCoeff(), d.cwiseAbs().maxCoeff()});
  double pc = 0.0, pd = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    pc += cs[k];
    pd += ds[k];
    if (pc < pd - tol * scale) return false;
  }
  return std::abs(pc - pd) <= tol * scale;
}

// Diagonal of a torus matrix with the same trace as d that majorizes d.
inline Vector torus_majorant_diagonal(const Vector& d, double tol = 1e-8) {
  if (!pp_contains(d, tol)) throw Error(ErrorKind::NotInParityPolytope, "target diagonal is not in PP_n");
  const Index n = d.size();
  const Index m = n / 2, off = n % 2;
  Vector c(n);
  if (off) c(0) = 1.0;
  const double t = std::clamp((static_cast<double>(n) - d.sum()) / 4.0, 0.0, static_cast<double>(m));
  Index fl = static_cast<Index>(std::floor(t));
  double delta = t - static_cast<double>(fl);
  if (fl >= m) {
    fl = m;
    delta = 0.0;
  }
  for (Index p = 0; p < m; ++p) {
    double v = 1.0;
    if (p < fl)
      v = -1.0;
    else if (p == fl)
      v = std::clamp(1.0 - 2.0 * delta, -1.0, 1.0);
    c(off + 2 * p) = v;
    c(off + 2 * p + 1) = v;
  }
  return c;
}

// Slot k of c ends up on coordinate placement[k]. Conjugating Diag(c placed by
// placement) by the rotations, in order (M <- G^T M G), gives diagonal d.
struct ChanLiReduction {
  std::vector<Index> placement;
  std::vector<PlanarRotation> rotations;

  Vector placed(const Vector& c) const {
    Vector out(c.size());
    for (Index k = 0; k < c.size(); ++k) out(placement[k]) = c(k);
    return out;
  }
};

inline ChanLiReduction chan_li_rotations(const Vector& c, const Vector& d, double tol = 1e-8) {
  if (!majorizes(c, d, tol)) throw Error(ErrorKind::NotMajorized, "c does not majorize d");
  const Index n = c.size();
  const double slack = tol * std::max({1.0, c.cwiseAbs().maxCoeff(), d.cwiseAbs().maxCoeff()});

  std::vector<std::pair<double, Index>> active(n);
  for (Index k = 0; k < n; ++k) active[k] = {c(k), k};
  std::sort(active.begin(), active.end());

  std::vector<Index> targets(n);
  std::iota(targets.begin(), targets.end(), Index{0});
  std::stable_sort(targets.begin(), targets.end(), [&](Index a, Index b) { return d(a) > d(b); });

  struct SlotRotation {
    Index p, q;
    double c, s;
  };
  std::vector<SlotRotation> slot_rots;
  ChanLiReduction out;
  out.placement.assign(n, -1);

  for (Index t : targets) {
    const double dk = d(t);
    auto it = std::upper_bound(active.begin(), active.end(), dk,
                               [](double v, const std::pair<double, Index>& e) { return v < e.first; });
    std::ptrdiff_t a = (it - active.begin()) - 1;
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(active.size()) - 1;
    bool fix_only = a == last || active.size() == 1;
    if (a < 0) {
      if (active.front().first - dk > slack) throw Error(ErrorKind::NotMajorized, "target below remaining values");
      a = 0;
      fix_only = true;
    } else if (a == last && dk - active.back().first > slack) {
      throw Error(ErrorKind::NotMajorized, "target above remaining values");
    }
    if (fix_only || active[a].first == dk) {
      out.placement[active[a].second] = t;
      active.erase(active.begin() + a);
      continue;
    }
    const double va = active[a].first, vb = active[a + 1].first;
    const double s2 = std::clamp((dk - va) / (vb - va), 0.0, 1.0);
    const Index p = active[a].second, q = active[a + 1].second;
    slot_rots.push_back({p, q, std::sqrt(1.0 - s2), std::sqrt(s2)});
    out.placement[p] = t;
    active[a + 1].first = va + vb - dk;
    active.erase(active.begin() + a);
  }

  out.rotations.reserve(slot_rots.size());
  for (const auto& r : slot_rots) {
    const Index i = out.placement[r.p], j = out.placement[r.q];
    if (i < j)
      out.rotations.push_back({i, j, r.c, r.s});
    else
      out.rotations.push_back({j, i, r.c, -r.s});
  }
  return out;
}

inline Matrix construct_with_diagonal(const Vector& d, double tol = 1e-8) {
  const Vector c = torus_majorant_diagonal(d, tol);
  const Index n = d.size();
  std::vector<double> thetas(n / 2);
  for (Index p = 0; p < n / 2; ++p) thetas[p] = std::acos(std::clamp(c(n % 2 + 2 * p), -1.0, 1.0));
  const Matrix r = torus_matrix(n, thetas);
  const ChanLiReduction plan = chan_li_rotations(c, d, tol);

  Matrix x(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) x(plan.placement[a], plan.placement[b]) = r(a, b);
  for (const auto& g : plan.rotations) g.conjugate(x);
  return x;
}

struct PolyhedralSet {
  Index n = 0;
  std::vector<Halfspace> rows;

  void add_equality(const Vector& a, double b) {
    rows.push_back({a, b});
    rows.push_back({-a, -b});
  }
};

enum class FeasibilityStatus { Found, InfeasibleUpTo };

struct DiagFeasibility {
  FeasibilityStatus status = FeasibilityStatus::InfeasibleUpTo;
  Matrix x;
  Vector diagonal;
  double eps = 0.0;
  long iterations = 0;
  std::optional<Halfspace> last_cut;
};

namespace detail {

inline Vector repair_into_pp(Vector d) {
  const Index n = d.size();
  if (n == 1) return Vector::Ones(1);
  d = d.cwiseMax(-1.0).cwiseMin(1.0);
  if (n == 2) {
    const double t = 0.5 * (d(0) + d(1));
    return Vector::Constant(2, t);
  }
  const double top = max_facet_violation(d) + static_cast<double>(n - 2);
  if (top > static_cast<double>(n - 2)) d *= static_cast<double>(n - 2) / top;
  return d;
}

}  // namespace detail

// Deep-cut ellipsoid over the eps-inflation of PP_n ∩ C, started from the ball of radius sqrt(n).
inline DiagFeasibility decide_diag_feasibility(const PolyhedralSet& cset, double eps) {
  const Index n = cset.n;
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "PolyhedralSet needs n >= 1");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  for (const auto& h : cset.rows) {
    if (h.a.size() != n) throw Error(ErrorKind::DimensionMismatch, "row length differs from n");
    if (!h.a.allFinite() || !std::isfinite(h.b)) throw Error(ErrorKind::NonFinite, "non-finite row");
  }
  DiagFeasibility res;
  res.eps = eps;

  auto worst_row = [&](const Vector& x, Halfspace& cut) {
    double worst = 0.0;
    for (const auto& h : cset.rows) {
      const double nrm = h.a.norm();
      if (nrm == 0.0) {
        if (h.b < -eps) {
          worst = std::numeric_limits<double>::infinity();
          cut = h;
        }
        continue;
      }
      const double v = (h.a.dot(x) - h.b) / nrm;
      if (v > worst) {
        worst = v;
        cut = {h.a / nrm, h.b / nrm};
      }
    }
    return worst;
  };

  auto finish = [&](const Vector& c) {
    res.diagonal = detail::repair_into_pp(c);
    res.x = construct_with_diagonal(res.diagonal, 1e-10);
    res.status = FeasibilityStatus::Found;
  };

  if (n == 1) {
    Halfspace cut;
    const Vector one = Vector::Ones(1);
    if (worst_row(one, cut) <= eps) {
      finish(one);
    } else {
      res.last_cut = cut;
    }
    return res;
  }

  const double nd = static_cast<double>(n);
  const long cap = static_cast<long>(std::ceil(2.0 * nd * (nd + 1.0) * std::log(std::sqrt(nd) / eps))) + 1;
  Vector c = Vector::Zero(n);
  Matrix P = nd * Matrix::Identity(n, n);

  for (long it = 0; it < cap; ++it) {
    res.iterations = it + 1;
    Halfspace pp_cut;
    double pp_viol = 0.0;
    Index bi = 0;
    c.cwiseAbs().maxCoeff(&bi);
    if (std::abs(c(bi)) - 1.0 > eps) {
      pp_cut = to_halfspace(BoxCut{bi, c(bi) > 0 ? 1 : -1, 0.0}, n);
      pp_viol = std::abs(c(bi)) - 1.0;
    } else {
      const OddSetCut oc = worst_odd_set(c);
      const double v = oc.violation / std::sqrt(nd);
      if (v > eps) {
        pp_cut = to_halfspace(oc, n);
        pp_cut.a /= std::sqrt(nd);
        pp_cut.b /= std::sqrt(nd);
        pp_viol = v;
      }
    }
    Halfspace row_cut;
    const double row_viol = worst_row(c, row_cut);
    if (std::isinf(row_viol)) {
      res.last_cut = row_cut;
      return res;
    }
    if (pp_viol <= eps && row_viol <= eps) {
      finish(c);
      return res;
    }

    // Cut against the inflated halfspace a.x <= b + eps; pick the deeper of the two candidates.
    auto depth = [&](const Halfspace& h) {
      return (h.a.dot(c) - h.b - eps) / std::sqrt(h.a.dot(P * h.a));
    };
    Halfspace cut = pp_viol > eps ? pp_cut : row_cut;
    if (pp_viol > eps && row_viol > eps && depth(row_cut) > depth(pp_cut)) cut = row_cut;
    res.last_cut = cut;

    const Vector Pa = P * cut.a;
    const double denom = std::sqrt(cut.a.dot(Pa));
    const double alpha = (cut.a.dot(c) - cut.b - eps) / denom;
    if (alpha >= 1.0) return res;
    const Vector bt = Pa / denom;
    c -= (1.0 + nd * alpha) / (nd + 1.0) * bt;
    P = (nd * nd * (1.0 - alpha * alpha) / (nd * nd - 1.0)) *
        (P - (2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha))) * bt * bt.transpose());
    P = 0.5 * (P + P.transpose());
  }
  return res;
}

}  // namespace rotopt
