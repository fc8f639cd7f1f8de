#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rotopt/parity_polytope.hpp"

using namespace rotopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d;
}

}  // namespace

TEST(PpContains, Examples) {
  EXPECT_TRUE(pp_contains(vec({1, 1, 1})));
  EXPECT_TRUE(pp_contains(vec({0, 0, 0})));
  EXPECT_FALSE(pp_contains(vec({1, 1, 0})));
  EXPECT_TRUE(pp_contains(vec({1})));
  EXPECT_FALSE(pp_contains(vec({0.5})));
  EXPECT_TRUE(pp_contains(vec({0.3, 0.3})));
  EXPECT_FALSE(pp_contains(vec({0.3, 0.2})));
}

TEST(PpSeparate, Examples) {
  const PpSeparation a = pp_separate(vec({1, 1, -1}));
  ASSERT_TRUE(std::holds_alternative<OddSetCut>(a));
  EXPECT_EQ(std::get<OddSetCut>(a).s, std::vector<Index>{2});
  EXPECT_DOUBLE_EQ(std::get<OddSetCut>(a).violation, 2.0);

  EXPECT_TRUE(std::holds_alternative<PpInside>(pp_separate(Vector::Ones(5))));

  const PpSeparation c = pp_separate(vec({2, 0, 0}));
  ASSERT_TRUE(std::holds_alternative<BoxCut>(c));
  EXPECT_EQ(std::get<BoxCut>(c).index, 0);
  EXPECT_EQ(std::get<BoxCut>(c).sign, 1);

  const PpSeparation d = pp_separate(vec({1, 1, 0}));
  ASSERT_TRUE(std::holds_alternative<OddSetCut>(d));
  EXPECT_EQ(std::get<OddSetCut>(d).s, std::vector<Index>{2});
  EXPECT_DOUBLE_EQ(std::get<OddSetCut>(d).violation, 1.0);
}

TEST(PpSeparate, PrefersBoxCuts) {
  const PpSeparation s = pp_separate(vec({1.5, 1, -1}));
  ASSERT_TRUE(std::holds_alternative<BoxCut>(s));
}

TEST(PpSeparate, CutsSeparateStrictlyAndKeepVertices) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 1; n <= 6; ++n) {
    const Matrix V = oracle::even_sign_vertices(n);
    for (int t = 0; t < 200; ++t) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d(i) = u(rng);
      const PpSeparation s = pp_separate(d);
      if (const auto* c = std::get_if<OddSetCut>(&s)) {
        EXPECT_EQ(c->s.size() % 2, 1u);
        const Halfspace h = to_halfspace(*c, n);
        EXPECT_GT(h.a.dot(d), h.b);
        EXPECT_NEAR(h.a.dot(d) - h.b, c->violation, 1e-12);
        for (Index k = 0; k < V.cols(); ++k) EXPECT_LE(h.a.dot(V.col(k)), h.b + 1e-12);
      }
    }
  }
}

TEST(PpContains, AgreesWithVertexLp) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 1; n <= 6; ++n) {
    const Matrix V = oracle::even_sign_vertices(n);
    for (int t = 0; t < 150; ++t) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d(i) = u(rng);
      EXPECT_EQ(pp_contains(d), oracle::in_hull(V, d)) << d.transpose();
    }
  }
}

TEST(PpMaximize, Examples) {
  const PpVertex a = pp_maximize(vec({1, 1, 1}));
  EXPECT_EQ(a.vertex, vec({1, 1, 1}));
  EXPECT_DOUBLE_EQ(a.value, 3.0);
  EXPECT_DOUBLE_EQ(pp_maximize(vec({-1, 2, 3})).value, 4.0);
  const PpVertex c = pp_maximize(vec({-3, 1, 2}));
  EXPECT_EQ(c.vertex, vec({-1, -1, 1}));
  EXPECT_DOUBLE_EQ(c.value, 4.0);
}

TEST(PpMaximize, MatchesVertexEnumeration) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 6; ++n) {
    const Matrix V = oracle::even_sign_vertices(n);
    for (int t = 0; t < 100; ++t) {
      Vector w(n);
      for (int i = 0; i < n; ++i) w(i) = g(rng);
      const PpVertex r = pp_maximize(w);
      EXPECT_EQ(r.value, oracle::vertex_max(V, w));
      int neg = 0;
      for (int i = 0; i < n; ++i) neg += r.vertex(i) < 0;
      EXPECT_EQ(neg % 2, 0);
    }
  }
}

TEST(PpMaximize, DominatesRandomPoints) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 9;
    Vector w(n);
    for (Index i = 0; i < n; ++i) w(i) = g(rng);
    const Vector x = pp_random_point(n, 1000 + t);
    EXPECT_GE(pp_maximize(w).value, w.dot(x) - 1e-12);
  }
}

TEST(PpRandomPoint, Examples) {
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(pp_contains(pp_random_point(3, s)));
  EXPECT_EQ(pp_random_point(1, 5), vec({1}));
  EXPECT_EQ(pp_random_point(7, 3), pp_random_point(7, 3));
  for (Index n = 2; n < 60; n += 7) EXPECT_TRUE(pp_contains(pp_random_point(n, n)));
}
