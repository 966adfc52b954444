#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ypq/chart.hpp"

using namespace ypq;

TEST(Params, HalfWithC1IsValid) {
  const auto p = validate_params(0.5, 1);
  EXPECT_EQ(p.c, 1);
  EXPECT_FALSE(p.is_t11_limit());
}

TEST(Params, C0IsT11Limit) {
  const auto p = validate_params(0.5, 0);
  EXPECT_TRUE(p.is_t11_limit());
}

TEST(Params, AEqualsTwoHasOneRealRoot) {
  // 2y^3 - 3y^2 + 2: the discriminant is negative
  EXPECT_LT(cubic_discriminant(YpqParams{2.0, 1}), 0.0);
  try {
    validate_params(2.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParamOutOfRange);
  }
}

TEST(Params, OutOfRange) {
  for (double a : {0.0, -0.1, 1.0, 1.5}) {
    EXPECT_THROW(validate_params(a, 1), Error) << a;
  }
  try {
    validate_params(0.5, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedC);
  }
}

TEST(Domain, HalfRootsFactorise) {
  // 2y^3 - 3y^2 + 1/2 = (y - 1/2)(2y^2 - 2y - 1)
  const auto dom = compute_domain(validate_params(0.5, 1));
  EXPECT_NEAR(dom.y1, (1.0 - std::sqrt(3.0)) / 2.0, 1e-12);
  EXPECT_NEAR(dom.y2, 0.5, 1e-12);
  for (double y : {dom.y1, dom.y2}) EXPECT_LT(std::abs(0.5 - 3 * y * y + 2 * y * y * y), 1e-12);
}

TEST(Domain, RootsPolishedAndStraddleZero) {
  for (double a : {0.05, 0.25, 0.5, 0.75, 0.99}) {
    const YpqParams prm = validate_params(a, 1);
    const auto dom = compute_domain(prm);
    EXPECT_LT(dom.y1, 0.0);
    EXPECT_GT(dom.y2, 0.0);
    EXPECT_LT(std::abs(cubic(prm, dom.y1)), 1e-12);
    EXPECT_LT(std::abs(cubic(prm, dom.y2)), 1e-12);
    const double mid = 0.5 * (dom.y1 + dom.y2);
    EXPECT_GT(p_of(prm, mid), 0.0) << a;
  }
}

TEST(Domain, PAtZero) {
  const YpqParams prm = validate_params(0.5, 1);
  EXPECT_NEAR(p_of(prm, 0.0), 1.0, 1e-15);
}

TEST(Domain, T11Roots) {
  // c = 0: a - 3y^2 vanishes at +-sqrt(a/3)
  const auto dom = compute_domain(validate_params(0.6, 0));
  EXPECT_NEAR(dom.y1, -std::sqrt(0.2), 1e-12);
  EXPECT_NEAR(dom.y2, std::sqrt(0.2), 1e-12);
}

TEST(Sampling, DeterministicForSeed) {
  const auto dom = compute_domain(validate_params(0.5, 1));
  const auto a = sample_point(dom, 77u).coords();
  const auto b = sample_point(dom, 77u).coords();
  EXPECT_EQ(a, b);
  const auto c = sample_point(dom, 78u).coords();
  EXPECT_NE(a, c);
}

TEST(Sampling, SweepStaysInsideMargin) {
  const YpqParams prm = validate_params(0.5, 1);
  const auto dom = compute_domain(prm, 1e-3);
  std::mt19937_64 rng(5);
  double min_sin = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const auto pt = sample_point(dom, rng);
    ASSERT_TRUE(in_interior(dom, pt.theta, pt.y));
    ASSERT_TRUE(pt.y >= dom.y1 + 1e-3 * (dom.y2 - dom.y1) && pt.y <= dom.y2 - 1e-3 * (dom.y2 - dom.y1));
    for (double ang : {pt.phi, pt.beta, pt.psi}) ASSERT_TRUE(ang >= 0.0 && ang < kTwoPi);
    ASSERT_GT(w_of(prm, pt.y), 0.0);
    ASSERT_GT(q_of(prm, pt.y), 0.0);
    ASSERT_GT(p_of(prm, pt.y), 0.0);
    min_sin = std::min(min_sin, std::sin(pt.theta));
  }
  EXPECT_GE(min_sin, std::sin(1e-3));
}

TEST(Sampling, PIsWTimesQ) {
  const YpqParams prm = validate_params(0.75, 1);
  const auto dom = compute_domain(prm);
  for (double t = 0.05; t < 1.0; t += 0.1) {
    const double y = dom.y1 + t * (dom.y2 - dom.y1);
    EXPECT_NEAR(p_of(prm, y), w_of(prm, y) * q_of(prm, y), 1e-13);
  }
}
