#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <variant>
#include <vector>

#include "rotopt/linalg.hpp"

namespace rotopt {

// <d, 1 - 2*1_S> <= n - 2 with |S| odd. Indices are 0-based and ascending.
struct OddSetCut {
  std::vector<Index> s;
  double violation = 0.0;
};

// sign * d[index] <= 1
struct BoxCut {
  Index index = 0;
  int sign = 1;
  double violation = 0.0;
};

struct PpInside {};

using PpSeparation = std::variant<PpInside, BoxCut, OddSetCut>;

// <a, x> <= b
struct Halfspace {
  Vector a;
  double b = 0.0;
};

inline Halfspace to_halfspace(const OddSetCut& cut, Index n) {
  Halfspace h{Vector::Ones(n), static_cast<double>(n - 2)};
  for (Index i : cut.s) h.a(i) = -1.0;
  return h;
}

inline Halfspace to_halfspace(const BoxCut& cut, Index n) {
  Halfspace h{Vector::Zero(n), 1.0};
  h.a(cut.index) = cut.sign;
  return h;
}

namespace detail {

inline void require_finite_vec(const Vector& d) {
  if (!d.allFinite()) throw Error(ErrorKind::NonFinite, "vector has non-finite entries");
}

inline std::vector<Index> ascending_order(const Vector& d) {
  std::vector<Index> idx(d.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return d(a) < d(b); });
  return idx;
}

struct OddPrefix {
  Index length = 1;
  double sum = 0.0;
};

inline OddPrefix min_odd_prefix(const Vector& d, const std::vector<Index>& order) {
  OddPrefix best{1, d(order[0])};
  double acc = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    acc += d(order[k]);
    if (k % 2 == 0 && acc < best.sum) best = {static_cast<Index>(k + 1), acc};
  }
  return best;
}

}  // namespace detail

// The odd set with the largest facet value; violation may be nonpositive.
inline OddSetCut worst_odd_set(const Vector& d) {
  detail::require_finite_vec(d);
  const auto order = detail::ascending_order(d);
  const auto p = detail::min_odd_prefix(d, order);
  OddSetCut cut;
  cut.s.assign(order.begin(), order.begin() + p.length);
  std::sort(cut.s.begin(), cut.s.end());
  cut.violation = d.sum() - 2.0 * p.sum - static_cast<double>(d.size() - 2);
  return cut;
}

// Largest value of <d, 1 - 2*1_S> - (n-2) over odd S.
inline double max_facet_violation(const Vector& d) { return worst_odd_set(d).violation; }

inline bool pp_contains(const Vector& d, double tol = 1e-8) {
  detail::require_finite_vec(d);
  if (d.size() == 0) return false;
  const double slack = tol * std::max(1.0, d.cwiseAbs().maxCoeff());
  if (d.cwiseAbs().maxCoeff() > 1.0 + slack) return false;
  return max_facet_violation(d) <= 2.0 * slack;
}

inline PpSeparation pp_separate(const Vector& d) {
  detail::require_finite_vec(d);
  const Index n = d.size();
  Index worst = 0;
  for (Index i = 1; i < n; ++i)
    if (std::abs(d(i)) > std::abs(d(worst))) worst = i;
  if (std::abs(d(worst)) > 1.0) return BoxCut{worst, d(worst) > 0 ? 1 : -1, std::abs(d(worst)) - 1.0};

  OddSetCut cut = worst_odd_set(d);
  if (cut.violation <= 0.0) return PpInside{};
  return cut;
}

struct PpVertex {
  Vector vertex;
  double value = 0.0;
};

// max <w, x> over PP_n: flip the even-size set of smallest entries.
inline PpVertex pp_maximize(const Vector& w) {
  detail::require_finite_vec(w);
  const Index n = w.size();
  const auto order = detail::ascending_order(w);
  Index best_k = 0;
  double best = 0.0, acc = 0.0;
  for (Index k = 1; k <= n; ++k) {
    acc += w(order[k - 1]);
    if (k % 2 == 0 && acc < best) {
      best = acc;
      best_k = k;
    }
  }
  PpVertex r{Vector::Ones(n), 0.0};
  for (Index k = 0; k < best_k; ++k) r.vertex(order[k]) = -1.0;
  r.value = w.dot(r.vertex);
  return r;
}

inline Vector pp_random_point(Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "n must be positive");
  if (n == 1) return Vector::Ones(1);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::exponential_distribution<double> ex(1.0);
  const Index m = n + 1;
  Vector d = Vector::Zero(n);
  double total = 0.0;
  for (Index k = 0; k < m; ++k) {
    Vector v(n);
    int neg = 0;
    for (Index i = 0; i < n; ++i) {
      v(i) = coin(rng) ? 1.0 : -1.0;
      neg += v(i) < 0;
    }
    if (neg % 2) {
      const Index i = pick(rng);
      v(i) = -v(i);
    }
    const double lam = ex(rng);
    d += lam * v;
    total += lam;
  }
  d /= total;
  return d.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace rotopt
