#include <gtest/gtest.h>

#include <cmath>

#include "msent/errors.hpp"
#include "msent/ladder.hpp"
#include "oracles.hpp"

using namespace msent;

namespace {

LadderSpec five() { return LadderSpec::geometric(2.0, 5); }

}  // namespace

TEST(Bundles, TanhConstantsMatchAnalyticMaxima) {
  const auto b = tanh_bundle(1.0);
  const double c2 = std::cosh(1.0) * std::cosh(1.0);
  EXPECT_NEAR(b.M1, 1.01 * c2, 1e-9 * c2);
  EXPECT_NEAR(b.M2, 1.01 * 2.0 * std::tanh(1.0) * c2 * c2, 1e-6);
  EXPECT_DOUBLE_EQ(b.C1(), 3.0 * b.M1 * b.M2);
  EXPECT_DOUBLE_EQ(b.C2(), b.M2 * (b.M1 * b.M1 + b.M1));
}

TEST(Bundles, Invariants) {
  for (const auto& b : {tanh_bundle(1.0), linear_bundle(2.0, 1.5), scaled_sinh_bundle(0.7, 1.0)}) {
    EXPECT_NO_THROW(validate_bundle(b));
    EXPECT_EQ(b.f(0.0), 0.0);
    EXPECT_GE(b.M1, 1.0);
    for (int i = -99; i <= 99; ++i) {
      const double x = b.R * i / 100.0;
      EXPECT_NEAR(b.inv(b.f(x)), x, 1e-10) << b.name;
    }
  }
  EXPECT_THROW(make_bundle("cubic", 1.0), InvalidArgument);
}

TEST(Dilate, Examples) {
  const auto t = tanh_bundle(2.0);
  EXPECT_DOUBLE_EQ(dilate(t, 1.0, 0.4), std::tanh(0.4));
  EXPECT_NEAR(dilate(t, 0.5, 1.0), 0.924234, 1e-6);
  const auto lin = linear_bundle(2.0, 4.0);
  EXPECT_DOUBLE_EQ(dilate(lin, 0.3, 1.7), 3.4);
  EXPECT_THROW(dilate(t, 1.0, 2.5), DomainError);
}

TEST(DilateInverse, Examples) {
  const auto t = tanh_bundle(1.0);
  EXPECT_DOUBLE_EQ(dilate_inverse(t, 1.0, 0.5), std::atanh(0.5));
  EXPECT_NEAR(dilate_inverse(t, 0.25, dilate(t, 0.25, 0.3)), 0.3, 1e-10);
  EXPECT_DOUBLE_EQ(dilate_inverse(linear_bundle(2.0, 1.0), 0.5, 1.0), 0.5);
  EXPECT_THROW(dilate_inverse(t, 1.0, 0.9), DomainError);
}

TEST(DeltaAndPsi, Examples) {
  // x = 1 lies outside the range of f_[0.5] on (-1, 1), so use R = 2.
  const auto t = tanh_bundle(2.0);
  EXPECT_EQ(delta_k(t, 0.5, 0.5, 0.3), 0.3);
  EXPECT_NEAR(delta_k(t, 0.5, 1.0, std::tanh(0.5) / 0.5), 0.761594, 1e-6);
  EXPECT_NEAR(psi_k(t, 0.5, 1.0, 1.0), -0.2, 1e-12);
  EXPECT_EQ(psi_k(t, 0.5, 0.5, 0.3), 0.0);
  const auto lin = linear_bundle(2.0, 1.0);
  for (double x : {-1.5, -0.2, 0.0, 0.9}) {
    EXPECT_NEAR(delta_k(lin, 0.25, 0.5, x), x, 1e-15);
    EXPECT_NEAR(psi_k(lin, 0.25, 0.5, x), 0.0, 1e-15);
  }
}

TEST(DeltaAndPsi, DerivativesMatchFiniteDifferences) {
  for (const auto& b : {tanh_bundle(1.0), scaled_sinh_bundle(0.7, 1.0)}) {
    const auto dom = psi_domain(b, 0.25);
    for (int i = 1; i < 40; ++i) {
      const double x = dom.lo + dom.width() * i / 40.0, h = 1e-5;
      const double d1 = (psi_k(b, 0.25, 0.5, x + h) - psi_k(b, 0.25, 0.5, x - h)) / (2 * h);
      const double d2 =
          (psi_k(b, 0.25, 0.5, x + h) - 2 * psi_k(b, 0.25, 0.5, x) + psi_k(b, 0.25, 0.5, x - h)) / (h * h);
      EXPECT_NEAR(psi_k_prime(b, 0.25, 0.5, x), d1, 1e-7) << b.name;
      EXPECT_NEAR(psi_k_second(b, 0.25, 0.5, x), d2, 1e-3) << b.name;
    }
  }
}

TEST(TanhClosedForm, Examples) {
  EXPECT_EQ(tanh_psi_closed_form(0.5, 0.0), 0.0);
  EXPECT_NEAR(tanh_psi_closed_form(0.5, 1.0), -0.2, 1e-15);
  EXPECT_NEAR(tanh_psi_closed_form(1.0, 2.0), -1.6, 1e-15);
}

TEST(TanhClosedForm, AgreesWithGenericPsiOnEveryLevel) {
  const auto t = tanh_bundle(1.0);
  const auto s = five();
  for (int k = 1; k <= 5; ++k) {
    const auto dom = psi_domain(t, s.gamma(k - 1));
    for (int i = 0; i < 1000; ++i) {
      const double x = dom.lo + dom.width() * (i + 0.5) / 1000.0;
      EXPECT_NEAR(psi_k(t, s.gamma(k - 1), s.gamma(k), x), msent::testing::oracle_tanh_psi(s.gamma(k - 1), x), 1e-10);
    }
  }
}

TEST(LadderSpec, Validation) {
  EXPECT_THROW(LadderSpec({0.5, 0.25, 1.0}), InvalidArgument);
  EXPECT_THROW(LadderSpec({0.25, 0.5}), InvalidArgument);
  EXPECT_THROW(LadderSpec({0.0, 1.0}), InvalidArgument);
  const auto s = five();
  EXPECT_EQ(s.d(), 5);
  EXPECT_DOUBLE_EQ(s.gamma(0), 1.0 / 32.0);
  EXPECT_DOUBLE_EQ(s.gamma(5), 1.0);
}

TEST(LadderCompose, Telescopes) {
  const auto t = tanh_bundle(1.0);
  EXPECT_NEAR(ladder_compose(t, five(), 0.7), 0.604368, 1e-6);
  EXPECT_NEAR(ladder_compose(t, LadderSpec({0.5, 1.0}), 0.3), std::tanh(0.3), 1e-12);
  for (const auto& b : {tanh_bundle(1.0), linear_bundle(3.0, 2.0), scaled_sinh_bundle(0.5, 1.0)}) {
    for (int i = 0; i < 200; ++i) {
      const double x = b.R * (-0.995 + 1.99 * i / 199.0);
      EXPECT_NEAR(ladder_compose(b, five(), x), b.f(x), 1e-9) << b.name;
    }
  }
  EXPECT_EQ(ladder_compose(linear_bundle(3.0, 2.0), five(), 0.5), 1.5);
}

TEST(EstimateLipschitz, Examples) {
  EXPECT_NEAR(estimate_lipschitz([](double x) { return 3 * x; }, -1, 1, 101), 3.0, 1e-9);
  const double sq = estimate_lipschitz([](double x) { return x * x; }, 0, 1, 1001);
  EXPECT_NEAR(sq, 2.0 - 1e-3, 1e-9);
  EXPECT_LT(sq, 2.0);
  EXPECT_EQ(estimate_lipschitz([](double) { return 4.0; }, 0, 1, 11), 0.0);
  EXPECT_THROW(estimate_lipschitz([](double x) { return x; }, 1, 0, 11), InvalidArgument);
}

TEST(EstimateSmoothness, QuadraticHasExactSecondDifference) {
  EXPECT_NEAR(estimate_smoothness([](double x) { return 1.5 * x * x; }, -1, 1, 1000), 3.0, 1e-6);
}

TEST(Theorem1, TanhCertificatesPass) {
  const auto certs = verify_theorem1(tanh_bundle(1.0), five(), 20001);
  ASSERT_EQ(certs.size(), 5u);
  for (const auto& c : certs) {
    EXPECT_TRUE(c.pass) << "level " << c.k;
    EXPECT_LE(c.lip_est, c.lip_bound);
    EXPECT_LE(c.smooth_est, c.smooth_bound);
    EXPECT_TRUE(c.domain.contains(0.0));
  }
}

TEST(Theorem1, LinearBundleEstimatesVanish) {
  for (const auto& c : verify_theorem1(linear_bundle(2.0, 1.0), five(), 2001)) {
    EXPECT_NEAR(c.lip_est, 0.0, 1e-12);
    EXPECT_NEAR(c.smooth_est, 0.0, 1e-6);
    EXPECT_TRUE(c.pass);
  }
}

TEST(Theorem1, SinhBundleCertificatesPass) {
  for (const auto& c : verify_theorem1(scaled_sinh_bundle(0.8, 1.0), five(), 20001)) EXPECT_TRUE(c.pass);
}

TEST(Prop1, Examples) {
  const auto t = tanh_bundle(1.0);
  for (double g : {1.0 / 32.0, 1.0 / 8.0, 0.5, 1.0}) {
    const auto c = verify_prop1(t, g, 20001);
    EXPECT_TRUE(c.pass) << g;
    EXPECT_DOUBLE_EQ(c.bound, g * t.M2 * t.R);
  }
  const auto lin = verify_prop1(linear_bundle(2.0, 1.0), 0.5, 1001);
  EXPECT_NEAR(lin.lip_est, 0.0, 1e-12);
  const auto tiny = verify_prop1(t, 1e-6, 1001);
  EXPECT_LT(tiny.lip_est, 1e-5);
}
