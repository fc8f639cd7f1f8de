#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rotopt/one_constraint.hpp"

using namespace rotopt;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

Matrix unit_gauss(Index n, std::mt19937_64& rng) {
  const Matrix m = gaussian_matrix(n, n, rng);
  return m / trace_norm(m);
}

const Matrix kA = Matrix::Identity(3, 3) / 3.0;
const Matrix kB = diag({1, 1, -1}) / 3.0;

}  // namespace

TEST(SupportPoint, Examples) {
  const TwoDImage img = TwoDImage::make(kA, kB);
  const SupportEvaluation e = support_point(img, Vec2(1, 0));
  EXPECT_NEAR(e.value, 1.0, 1e-14);
  EXPECT_NEAR(e.point(0), 1.0, 1e-14);
  EXPECT_NEAR(e.point(1), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(support_point(img, Vec2(0, 1)).value, 1.0 / 3.0, 1e-14);
  EXPECT_EQ(support_point(img, Vec2(0, 0)).value, 0.0);
  EXPECT_THROW(support_point(img, Vec2(NAN, 0)), Error);
}

TEST(SupportPoint, ValueMatchesPointAndHoelder) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    const Index n = 3 + t % 5;
    const TwoDImage img = TwoDImage::make(unit_gauss(n, rng), unit_gauss(n, rng));
    const Vec2 y(g(rng), g(rng));
    const SupportEvaluation e = support_point(img, y);
    EXPECT_NEAR(y.dot(e.point), e.value, 1e-12);
    EXPECT_LE(e.point.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(GoldenMinimize, Examples) {
  const double eps = 1e-6;
  const GoldenResult a = golden_minimize([](double x) { return std::abs(x - 0.3); }, eps);
  EXPECT_NEAR(a.alpha, 0.3, eps);
  const GoldenResult b = golden_minimize([](double x) { return x; }, eps);
  EXPECT_LE(b.alpha, eps);
  const int bound = static_cast<int>(std::ceil(std::log((4.0 + 2.0 * eps) / eps) / std::log((1 + std::sqrt(5.0)) / 2))) + 2;
  EXPECT_LE(a.evaluations, bound);
  EXPECT_LE(b.evaluations, bound);
}

TEST(GoldenMinimize, MatchesGridScanOnSegmentFunction) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const TwoDImage img = TwoDImage::make(unit_gauss(4, rng), unit_gauss(4, rng));
    const Vec2 x(0.3 * std::cos(t), 0.3 * std::sin(t));
    for (int s : {1, -1}) {
      auto f = [&](double a) {
        const Vec2 y(a, s * (1.0 - a));
        return support_value(img, y) - y.dot(x);
      };
      const double eps = 1e-5;
      const GoldenResult r = golden_minimize(f, eps);
      double grid = INFINITY;
      const int k = 10000;
      for (int i = 0; i <= k; ++i) grid = std::min(grid, f(static_cast<double>(i) / k));
      // Lipschitz constant is at most 4, so the grid misses the minimum by at most 2/k.
      EXPECT_LE(r.value, grid + eps);
      EXPECT_GE(r.value, grid - 4.0 / (2 * k) - 1e-12);
    }
  }
}

TEST(WeakSeparation, Examples) {
  const TwoDImage img = TwoDImage::make(kA, kB);
  const WeakSeparation a = weak_separation(img, Vec2(2, 0), 1e-4);
  EXPECT_FALSE(a.inside);
  EXPECT_EQ(a.y, Vec2(1, 0));
  EXPECT_TRUE(weak_separation(img, Vec2(0, 0), 1e-4).inside);
  const Vec2 x(1, 1);
  const WeakSeparation c = weak_separation(img, x, 1e-4);
  ASSERT_FALSE(c.inside);
  EXPECT_NEAR(c.y.lpNorm<1>(), 1.0, 1e-12);
  EXPECT_GE(c.y.dot(x), support_value(img, c.y));
}

TEST(WeakSeparation, SeparatorsAreValid) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  const double eps = 1e-4;
  int separated = 0, inside = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 3 + t % 4;
    const TwoDImage img = TwoDImage::make(unit_gauss(n, rng), unit_gauss(n, rng));
    const Vec2 x(u(rng), u(rng));
    const WeakSeparation w = weak_separation(img, x, eps);
    if (w.inside) {
      ++inside;
      // Inside claims are checked densely: no direction separates x by more than eps.
      for (int k = 0; k < 720; ++k) {
        const double th = 2 * M_PI * k / 720.0;
        Vec2 y(std::cos(th), std::sin(th));
        y /= y.lpNorm<1>();
        EXPECT_GE(support_value(img, y) - y.dot(x), -eps - 1e-9);
      }
    } else {
      ++separated;
      EXPECT_NEAR(w.y.lpNorm<1>(), 1.0, 1e-12);
      EXPECT_GE(w.y.dot(x), support_value(img, w.y) - 2 * eps);
    }
  }
  EXPECT_GT(separated, 0);
  EXPECT_GT(inside, 0);
}

TEST(WeakSeparation, MidpointsOfImagePointsAreInside) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    const Index n = 3 + t % 4;
    const TwoDImage img = TwoDImage::make(unit_gauss(n, rng), unit_gauss(n, rng));
    const Vec2 p = support_point(img, Vec2(g(rng), g(rng))).point;
    const Vec2 q = support_point(img, Vec2(g(rng), g(rng))).point;
    EXPECT_TRUE(weak_separation(img, 0.5 * (p + q), 1e-4).inside);
  }
}

TEST(SolveOneConstraint, Examples) {
  const double eps = 1e-5;
  const OneConstraintResult a = solve_one_constraint(kA, kA, 1.0, 1.0, eps);
  EXPECT_NEAR(a.value, 1.0, 2 * eps);
  EXPECT_NEAR(a.point(1), 1.0, 2 * eps);

  const OneConstraintResult b = solve_one_constraint(kA, kB, -1.0 / 3.0, -1.0 / 3.0, eps);
  EXPECT_NEAR(b.value, 1.0 / 3.0, 2 * eps);

  const OneConstraintResult c = solve_one_constraint(kA, kB, -1.0, 1.0, eps);
  EXPECT_NEAR(c.value, 1.0, 2 * eps);
  EXPECT_EQ(c.certificate.alpha, 1.0);
  EXPECT_EQ(c.certificate.beta, 0.0);
}

TEST(SolveOneConstraint, Errors) {
  EXPECT_THROW(solve_one_constraint(kA, kB, 1.0, 0.0, 1e-4), Error);
  try {
    solve_one_constraint(kA, kB, 0.9, 1.0, 1e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
  EXPECT_THROW(solve_one_constraint(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 0, 1, 1e-4), Error);
}

TEST(SolveOneConstraint, ScalesBackToOriginalUnits) {
  const OneConstraintResult r = solve_one_constraint(6.0 * kA, kB, -1.0 / 3.0, -1.0 / 3.0, 1e-5);
  EXPECT_NEAR(r.value, 2.0, 1e-4);
}

TEST(SolveOneConstraint, AgreesWithEulerGrid) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const double eps = 1e-4;
  for (int t = 0; t < 6; ++t) {
    const Matrix a = unit_gauss(3, rng), b = unit_gauss(3, rng);
    const TwoDImage img = TwoDImage::make(a, b);
    const double top = support_value(img, Vec2(0, 1)), bottom = -support_value(img, Vec2(0, -1));
    double lo = bottom + (top - bottom) * (0.5 + 0.5 * u(rng)), hi = bottom + (top - bottom) * (0.5 + 0.5 * u(rng));
    if (lo > hi) std::swap(lo, hi);
    const OneConstraintResult r = solve_one_constraint(a, b, lo, hi, eps);
    const double grid = oracle::euler_grid_max(a, b, lo, hi);
    EXPECT_NEAR(r.value, grid, std::max(2 * eps, 2e-3));
    const double str = support_value(img, Vec2(r.certificate.alpha, r.certificate.beta));
    EXPECT_LE(str - Vec2(r.certificate.alpha, r.certificate.beta).dot(r.point_normalized), 2 * eps);
    EXPECT_NEAR(std::abs(r.certificate.alpha) + std::abs(r.certificate.beta), 1.0, 1e-12);
    EXPECT_LE(r.oracle_calls, 200.0 * std::log(1.0 / eps));
  }
}

TEST(SolveOneConstraint, DegenerateSegment) {
  const OneConstraintResult r = solve_one_constraint(kA, -kA, -0.5, 0.2, 1e-5);
  EXPECT_TRUE(r.degenerate);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
}

TEST(RoundCertificate, Examples) {
  EXPECT_TRUE(round_certificate(Matrix::Identity(3, 3), kB, {1.0, 0.0, 0.0}).isApprox(Matrix::Identity(3, 3), 1e-12));
  EXPECT_TRUE(round_certificate(kB, diag({1, 2, 3}), {0.0, 1.0, 0.0}).isApprox(Matrix::Identity(3, 3), 1e-12));
  std::mt19937_64 rng(6);
  const Matrix a = unit_gauss(5, rng), b = unit_gauss(5, rng);
  const Certificate c{0.4, -0.6, 0.0};
  const Matrix x = round_certificate(a, b, c);
  const Matrix m = 0.4 * a - 0.6 * b;
  EXPECT_TRUE(membership(x, Group::SO, 1e-9));
  EXPECT_NEAR(m.cwiseProduct(x).sum(), special_trace(m).value, 1e-12);
}

TEST(ImageBoundaryPolygon, DiskForCornerEntries) {
  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  b(0, 1) = 1.0;
  const auto pts = image_boundary_polygon(a, b, 64);
  ASSERT_EQ(pts.size(), 64u);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    EXPECT_NEAR(pts[j].norm(), 1.0, 1e-12);
    const double th = 2 * M_PI * j / 64.0;
    EXPECT_NEAR(pts[j].dot(Vec2(std::cos(th), std::sin(th))), 1.0, 1e-12);
  }
}

TEST(ImageBoundaryPolygon, SinglePointAndSupportIdentity) {
  std::mt19937_64 rng(7);
  const Matrix a = 2.0 * unit_gauss(4, rng), b = 0.5 * unit_gauss(4, rng);
  const auto one = image_boundary_polygon(a, b, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0](0), special_trace(a).value, 1e-12);
  const auto pts = image_boundary_polygon(a, b, 16);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double th = 2 * M_PI * j / 16.0;
    const Vec2 y(std::cos(th), std::sin(th));
    EXPECT_NEAR(y.dot(pts[j]), special_trace(y(0) * a + y(1) * b).value, 1e-12);
  }
  EXPECT_THROW(image_boundary_polygon(a, b, 0), Error);
}
