#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rotopt/linalg.hpp"

namespace rotopt {

using Vec2 = Eigen::Vector2d;

// A and B rescaled to unit trace norm; pi(X) = (<A,X>, <B,X>).
struct TwoDImage {
  Matrix a_mat;
  Matrix b_mat;
  double scale_a = 1.0;
  double scale_b = 1.0;

  static TwoDImage make(const Matrix& a, const Matrix& b) {
    require_finite(a, "A");
    require_finite(b, "B");
    require_square(a, "A");
    if (b.rows() != a.rows() || b.cols() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    TwoDImage img;
    img.scale_a = trace_norm(a);
    img.scale_b = trace_norm(b);
    if (img.scale_a == 0.0 || img.scale_b == 0.0) throw Error(ErrorKind::InvalidArgument, "A and B must be nonzero");
    img.a_mat = a / img.scale_a;
    img.b_mat = b / img.scale_b;
    return img;
  }

  Index n() const { return a_mat.rows(); }
  Matrix combine(const Vec2& y) const { return y(0) * a_mat + y(1) * b_mat; }
};

struct SupportEvaluation {
  Vec2 y = Vec2::Zero();
  double value = 0.0;
  Vec2 point = Vec2::Zero();
};

inline SupportEvaluation support_point(const TwoDImage& img, const Vec2& y) {
  if (!y.allFinite()) throw Error(ErrorKind::NonFinite, "direction is not finite");
  const TraceMax t = special_trace(img.combine(y));
  SupportEvaluation e;
  e.y = y;
  e.value = t.value;
  e.point = Vec2(img.a_mat.cwiseProduct(t.argmax).sum(), img.b_mat.cwiseProduct(t.argmax).sum());
  return e;
}

inline double support_value(const TwoDImage& img, const Vec2& y) { return special_trace_value(img.combine(y)); }

struct GoldenResult {
  double alpha = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

// Golden-section search on [0, 1] for a convex g with Lipschitz constant `lipschitz`
// (default 4 + 2 eps). Stops early once a value <= stop_below is seen.
template <class F>
GoldenResult golden_minimize(F&& g, double eps, double lipschitz = -1.0,
                             double stop_below = -std::numeric_limits<double>::infinity()) {
  if (lipschitz <= 0.0) lipschitz = 4.0 + 2.0 * eps;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  GoldenResult best;
  auto eval = [&](double x) {
    const double v = g(x);
    ++best.evaluations;
    if (best.evaluations == 1 || v < best.value) {
      best.value = v;
      best.alpha = x;
    }
    return v;
  };
  double f1 = eval(x1);
  if (f1 <= stop_below) return best;
  double f2 = eval(x2);
  while (f2 > stop_below && (b - a) * lipschitz > eps) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = eval(x1);
      if (f1 <= stop_below) break;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = eval(x2);
    }
  }
  return best;
}

// Support evaluations collected so far, with directions normalized to |y|_1 = 1.
// Every stored point lies in the image, so their hull is an inner approximation.
class SupportCache {
 public:
  explicit SupportCache(const TwoDImage& img) : img_(&img) {
    add(Vec2(1, 0));
    add(Vec2(0, 1));
    add(Vec2(-1, 0));
    add(Vec2(0, -1));
  }

  const SupportEvaluation& add(Vec2 y) {
    y /= y.lpNorm<1>();
    entries_.push_back(support_point(*img_, y));
    return entries_.back();
  }

  const std::vector<SupportEvaluation>& entries() const { return entries_; }
  const SupportEvaluation& axis(int k) const { return entries_[k]; }  // (1,0), (0,1), (-1,0), (0,-1)
  long evaluations() const { return static_cast<long>(entries_.size()); }
  const TwoDImage& image() const { return *img_; }

 private:
  const TwoDImage* img_;
  std::vector<SupportEvaluation> entries_;
};

struct WeakSeparation {
  bool inside = true;
  Vec2 y = Vec2::Zero();
  double gap = 0.0;  // str(pi*(y)) - <y, x> at the returned y
  long new_evaluations = 0;
};

namespace detail {

struct SphereMin {
  double value;
  Vec2 y;
};

// min over |y|_1 = 1 of max_k <y, q_k>. The sphere is split into the four segments
// y = (s1 * alpha, s2 * (1 - alpha)), alpha in [0, 1].
inline SphereMin min_max_on_l1_sphere(const std::vector<Vec2>& q) {
  SphereMin best{std::numeric_limits<double>::infinity(), Vec2(1, 0)};
  static const int signs[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  std::vector<double> slope(q.size()), icpt(q.size());
  for (const auto& sg : signs) {
    for (std::size_t k = 0; k < q.size(); ++k) {
      slope[k] = sg[0] * q[k](0) - sg[1] * q[k](1);
      icpt[k] = sg[1] * q[k](1);
    }
    auto env = [&](double a, double& s_lo, double& s_hi) {
      double v = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < q.size(); ++k) {
        const double w = slope[k] * a + icpt[k];
        if (w > v) {
          v = w;
          s_lo = s_hi = slope[k];
        } else if (w == v) {
          s_lo = std::min(s_lo, slope[k]);
          s_hi = std::max(s_hi, slope[k]);
        }
      }
      return v;
    };
    double lo = 0.0, hi = 1.0, sl = 0.0, sh = 0.0;
    double a_best = 0.0;
    double v_best = env(0.0, sl, sh);
    if (sh < 0.0) {
      const double v1 = env(1.0, sl, sh);
      if (sl <= 0.0) {
        a_best = 1.0;
        v_best = v1;
      } else {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          env(mid, sl, sh);
          if (sh < 0.0)
            lo = mid;
          else if (sl > 0.0)
            hi = mid;
          else {
            lo = hi = mid;
            break;
          }
        }
        a_best = 0.5 * (lo + hi);
        v_best = env(a_best, sl, sh);
      }
    }
    if (v_best < best.value) best = {v_best, Vec2(sg[0] * a_best, sg[1] * (1.0 - a_best))};
  }
  return best;
}

}  // namespace detail

// Either certifies x within the eps box of the image or returns y with <y, x> >= str(pi*(y)).
inline WeakSeparation weak_separation(SupportCache& cache, const Vec2& x, double eps, long max_new = 100) {
  if (!x.allFinite()) throw Error(ErrorKind::NonFinite, "query point is not finite");
  WeakSeparation r;
  if (x.cwiseAbs().maxCoeff() > 1.0 + eps) {
    const int i = std::abs(x(0)) >= std::abs(x(1)) ? 0 : 1;
    r.inside = false;
    r.y = Vec2::Zero();
    r.y(i) = x(i) > 0 ? 1.0 : -1.0;
    r.gap = 1.0 - std::abs(x(i));
    return r;
  }
  constexpr double sep_tol = 1e-12;
  std::vector<Vec2> q;
  std::size_t seen = 0;
  for (long round = 0;; ++round) {
    const auto& es = cache.entries();
    double fmin = std::numeric_limits<double>::infinity();
    std::size_t kmin = 0;
    for (std::size_t k = 0; k < es.size(); ++k) {
      const double f = es[k].value - es[k].y.dot(x);
      if (f < fmin) {
        fmin = f;
        kmin = k;
      }
    }
    if (fmin < -sep_tol) {
      r.inside = false;
      r.y = es[kmin].y;
      r.gap = fmin;
      return r;
    }
    for (; seen < es.size(); ++seen) q.push_back(es[seen].point - x);
    const detail::SphereMin lb = detail::min_max_on_l1_sphere(q);
    if (lb.value >= -eps || round >= max_new) {
      r.inside = true;
      r.gap = lb.value;
      return r;
    }
    cache.add(lb.y);
    ++r.new_evaluations;
  }
}

inline WeakSeparation weak_separation(const TwoDImage& img, const Vec2& x, double eps) {
  SupportCache cache(img);
  return weak_separation(cache, x, eps);
}

struct Certificate {
  double alpha = 1.0;
  double beta = 0.0;
  double slack = 0.0;
};

struct OneConstraintResult {
  double value = 0.0;                     // max <A, X>, original units
  Vec2 point = Vec2::Zero();              // (<A,X>, <B,X>), original units
  Vec2 point_normalized = Vec2::Zero();   // same for the unit trace-norm pair
  double upper_bound = 0.0;               // normalized bound on the optimum of the first coordinate
  Certificate certificate;
  long oracle_calls = 0;
  long support_evaluations = 0;
  long iterations = 0;
  bool degenerate = false;
};

namespace detail {

inline Certificate extract_certificate(const TwoDImage& img, const SupportCache& cache, const Vec2& xh, double eps,
                                       long& evaluations) {
  Certificate best;
  const auto& e10 = cache.axis(0);
  const double f10 = e10.value - e10.y.dot(xh);
  double fmin = f10;
  Vec2 ymin(1, 0);
  for (int s : {1, -1}) {
    auto g = [&](double a) {
      const Vec2 y(a, s * (1.0 - a));
      return support_value(img, y) - y.dot(xh);
    };
    const GoldenResult gr = golden_minimize(g, eps / 4.0);
    evaluations += gr.evaluations;
    if (gr.value < fmin) {
      fmin = gr.value;
      ymin = Vec2(gr.alpha, s * (1.0 - gr.alpha));
    }
  }
  if (f10 <= fmin + eps / 4.0) {
    best = {1.0, 0.0, f10};
  } else {
    best = {ymin(0), ymin(1), fmin};
  }
  return best;
}

}  // namespace detail

// max <A, X> subject to <B, X> in [lo, hi] over SO(n), n >= 3. eps is in units of the
// unit trace-norm rescaling; value and point are returned in original units.
inline OneConstraintResult solve_one_constraint(const Matrix& a, const Matrix& b, double lo, double hi, double eps) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorKind::NonFinite, "interval is not finite");
  if (lo > hi) throw Error(ErrorKind::InvalidArgument, "interval has lo > hi");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  const TwoDImage img = TwoDImage::make(a, b);
  if (img.n() < 3) throw Error(ErrorKind::DimensionMismatch, "one-constraint solver needs n >= 3");

  OneConstraintResult res;
  SupportCache cache(img);
  const double top = cache.axis(1).value;
  const double bottom = -cache.axis(3).value;
  const double a_lo = lo / img.scale_b, a_hi = hi / img.scale_b;
  if (a_lo > top + eps || a_hi < bottom - eps)
    throw Error(ErrorKind::Infeasible, "no image point meets the interval");
  double s_lo = std::max(a_lo, bottom), s_hi = std::min(a_hi, top);
  if (s_lo > s_hi) s_lo = s_hi = a_lo > top ? top : bottom;

  auto finish = [&](const Vec2& xh) {
    res.point_normalized = xh;
    res.value = img.scale_a * xh(0);
    res.point = Vec2(img.scale_a * xh(0), img.scale_b * xh(1));
    res.support_evaluations = cache.evaluations();
    res.certificate = detail::extract_certificate(img, cache, xh, eps, res.support_evaluations);
    return res;
  };

  // B = +-A: the image is a segment on x2 = +-x1.
  for (int s : {1, -1}) {
    if (trace_norm(img.b_mat - s * img.a_mat) <= 1e-12) {
      res.degenerate = true;
      const double x2 = s > 0 ? s_hi : s_lo;
      res.upper_bound = s * x2;
      return finish(Vec2(s * x2, x2));
    }
  }

  double strip_lo = s_lo, strip_hi = s_hi;
  if (strip_hi - strip_lo < eps) {
    const double mid = 0.5 * (strip_lo + strip_hi);
    strip_lo = mid - eps / 2.0;
    strip_hi = mid + eps / 2.0;
  }

  Vec2 c = Vec2::Zero();
  Eigen::Matrix2d P = 4.0 * Eigen::Matrix2d::Identity();
  bool have_best = false;
  Vec2 best = Vec2::Zero();
  const long cap = static_cast<long>(std::ceil(40.0 * std::log(4.0 / eps)));
  for (long it = 0; it < cap; ++it) {
    res.iterations = it + 1;
    Vec2 g;
    if (c(1) < strip_lo) {
      g = Vec2(0, -1);
    } else if (c(1) > strip_hi) {
      g = Vec2(0, 1);
    } else {
      ++res.oracle_calls;
      const WeakSeparation ws = weak_separation(cache, c, eps);
      if (!ws.inside) {
        g = ws.y;
      } else {
        if (!have_best || c(0) > best(0)) best = c;
        have_best = true;
        g = Vec2(-1, 0);
      }
    }
    const Vec2 pg = P * g;
    const Vec2 bb = pg / std::sqrt(g.dot(pg));
    c -= bb / 3.0;
    P = (4.0 / 3.0) * (P - (2.0 / 3.0) * bb * bb.transpose());
    P = 0.5 * (P + P.transpose());

    const double w1 = std::sqrt(P(0, 0)), w2 = std::sqrt(P(1, 1));
    res.upper_bound = have_best ? std::max(best(0), c(0) + w1) : c(0) + w1;
    if (have_best && c(0) + w1 - best(0) <= eps) break;
    if (w1 <= eps / 4.0 && w2 <= eps / 4.0) break;
  }
  return finish(have_best ? best : c);
}

// Heuristic rotation from a certificate: the maximizer of <alpha A + beta B, X> over SO(n).
inline Matrix round_certificate(const Matrix& a, const Matrix& b, const Certificate& cert) {
  const TwoDImage img = TwoDImage::make(a, b);
  return special_trace(img.combine(Vec2(cert.alpha, cert.beta))).argmax;
}

// Support points of pi(SO(n)) for k equally spaced directions, in the original units of A and B.
inline std::vector<Vec2> image_boundary_polygon(const Matrix& a, const Matrix& b, Index k) {
  require_finite(a, "A");
  require_finite(b, "B");
  require_square(a, "A");
  if (b.rows() != a.rows() || b.cols() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  std::vector<Vec2> pts;
  pts.reserve(k);
  for (Index j = 0; j < k; ++j) {
    const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k);
    const Matrix m = std::cos(th) * a + std::sin(th) * b;
    const Matrix x = special_trace(m).argmax;
    pts.emplace_back(a.cwiseProduct(x).sum(), b.cwiseProduct(x).sum());
  }
  return pts;
}

}  // namespace rotopt
