#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "svelab/conditions.hpp"
#include "svelab/error.hpp"
#include "svelab/mlf.hpp"

namespace {

using namespace svelab;
using namespace svelab::conditions;
using spectral::DiagonalOperator;
using spectral::FractionalPair;

CoefficientConstants drift_only(double c) {
  CoefficientConstants k;
  k.C_F_lin = k.C_F_lip = c;
  return k;
}

TEST(OneDimTheorem, ConditionAExample) {
  const auto r = check_1d_theorem(-2.0, 0.5, 1.0, drift_only(1.0));
  EXPECT_EQ(r.a.verdict, Verdict::pass);
  EXPECT_NEAR(r.a.lhs, 1.0, 1e-9);
  EXPECT_EQ(r.a.threshold, 2.0);
  EXPECT_NEAR(r.a.term("c_1"), 1.0, 1e-9);
}

TEST(OneDimTheorem, ConditionANeedsAdditiveNoise) {
  CoefficientConstants c = drift_only(0.1);
  c.C_sigma_lip = 0.2;
  const auto r = check_1d_theorem(-2.0, 0.5, 1.0, c);
  EXPECT_EQ(r.a.verdict, Verdict::fail);
  EXPECT_NE(r.a.diagnostic.find("constant sigma"), std::string::npos);
}

TEST(OneDimTheorem, ConditionBZeroAndPrintedForm) {
  const auto zero = check_1d_theorem(-1.0, 0.7, 0.9, CoefficientConstants{});
  EXPECT_EQ(zero.b.lhs, 0.0);
  EXPECT_EQ(zero.b.verdict, Verdict::pass);

  CoefficientConstants c;
  c.C_sigma_lin = 1.0;
  const auto r = check_1d_theorem(-1.0, 1.0, 1.0, c);
  EXPECT_NEAR(r.b.lhs, 0.75, 1e-9);
  EXPECT_EQ(r.b.verdict, Verdict::pass);
  ASSERT_EQ(r.b.variants.size(), 1u);
  EXPECT_NEAR(r.b.variants[0].lhs, 1.5, 1e-9);
  EXPECT_EQ(r.b.variants[0].verdict, Verdict::fail);
}

TEST(OneDimTheorem, NonIntegrableC2Fails) {
  CoefficientConstants c;
  c.C_sigma_lin = 0.1;
  const auto r = check_1d_theorem(-1.0, 0.5, 1.0, c);  // beta = alpha + 1/2
  EXPECT_EQ(r.b.verdict, Verdict::fail);
  EXPECT_NE(r.b.diagnostic.find("c_2"), std::string::npos);
  EXPECT_THROW(check_1d_theorem(-1.0, 0.5, 0.4, c), DomainError);
  EXPECT_THROW(check_1d_theorem(1.0, 0.5, 0.7, c), DomainError);
}

TEST(OneDimTheorem, ScaleConsistency) {
  const auto base = check_1d_theorem(-1.0, 0.8, 1.0, drift_only(0.7));
  for (double c : {1.5, 3.0, 10.0}) {
    const auto scaled = check_1d_theorem(-c, 0.8, 1.0, drift_only(0.7));
    EXPECT_LT(scaled.a.lhs / scaled.a.threshold, base.a.lhs / base.a.threshold);
  }
}

TEST(GeneralLimit, ZeroConstants) {
  const auto op = DiagonalOperator::dirichlet_laplacian(2, 10);
  for (Variant v : {Variant::limit, Variant::stability}) {
    const auto r = check_general_limit(op, FractionalPair{0.8, 1.0}, CoefficientConstants{}, 0.0, v);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.verdict, Verdict::pass);
  }
}

TEST(GeneralLimit, MultiplicativeHeatInstance) {
  // d = 1, alpha = beta = 1, delta = 0: 3 C^2 c_2(1,1) sum n^{-2}
  const double C = 0.5;
  CoefficientConstants c;
  c.C_sigma_lin = c.C_sigma_lip = C;
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 400);
  const auto r = check_general_limit(op, FractionalPair{1.0, 1.0}, c, 0.0, Variant::limit);
  const double series = 3.0 * C * C * 0.5 * std::numbers::pi * std::numbers::pi / 6.0;
  EXPECT_NEAR(r.lhs, series, r.error_band + 1e-9);
  EXPECT_LT(r.error_band, 1e-2);
  const auto closed = check_multiplicative_heat_closed_form(1, 1.0, 1.0, 0.0, C);
  EXPECT_NEAR(closed.lhs, 3.0 * C * C * 0.5 * 1.0 / (2.0 - 1.0), 1e-9);
  EXPECT_EQ(closed.term("omega_d"), 1.0);
  EXPECT_EQ(closed.verdict, Verdict::pass);
  EXPECT_EQ(check_multiplicative_heat_closed_form(1, 1.0, 0.75, 0.0, C).verdict, Verdict::fail);
}

TEST(GeneralLimit, DivergentFactorIsNamed) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 50);
  const auto r = check_general_limit(op, FractionalPair{0.8, 1.0}, drift_only(0.1), 0.5, Variant::limit);
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_TRUE(std::isinf(r.lhs));
  EXPECT_NE(r.diagnostic.find("E_k"), std::string::npos);
  CoefficientConstants s;
  s.C_sigma_lin = 0.1;
  const auto h = check_general_limit(DiagonalOperator::dirichlet_laplacian(3, 5), FractionalPair{1.0, 1.2}, s, 0.0,
                                     Variant::limit);
  EXPECT_EQ(h.verdict, Verdict::fail);
  EXPECT_NE(h.diagnostic.find("E_h"), std::string::npos);
}

TEST(GeneralLimit, CompletelyMonotoneKernel) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 100);
  const Kernel k = Kernel::log1p_inverse(0.25);
  CoefficientConstants c = drift_only(0.2);
  c.C_sigma_lin = 0.01;
  const auto r = check_general_limit(op, k, 1.0, c, 0.0, Variant::limit);
  EXPECT_NEAR(r.term("E_k_L1"), 1.0, 1e-14);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(Additive, Examples) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 64);
  for (double alpha : {0.3, 0.6, 1.0}) {
    const auto r = check_additive(op, alpha, 0.5, 0.0);
    EXPECT_NEAR(r.lhs, 0.5, 1e-9);
    EXPECT_EQ(r.verdict, Verdict::pass);
  }
  EXPECT_EQ(check_additive(op, 0.6, 1.0, 0.0).verdict, Verdict::inconclusive);
  EXPECT_EQ(check_additive(op, 0.6, 1.01, 0.0).verdict, Verdict::fail);
}

TEST(Additive, ClosedFormVariant) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 400);
  const double C = 0.3, delta = 0.2;
  const auto r = check_additive(op, 0.9, C, delta);
  ASSERT_EQ(r.variants.size(), 1u);
  EXPECT_NEAR(r.variants[0].lhs, C / (1.0 - 2.0 * delta), 1e-9);
  // the series itself, sum n^{-2 + 2 delta}
  double s = 0.0;
  for (int n = 1; n <= 200000; ++n) s += std::pow(double(n), -2.0 + 2.0 * delta);
  EXPECT_NEAR(r.lhs, C * s, r.error_band + 1e-3);
}

TEST(Additive, CompletelyMonotoneKernel) {
  const auto op = DiagonalOperator::explicit_list({2.0, 7.0});
  const auto r = check_additive(op, Kernel::log1p_inverse(0.5), 0.8, 0.0);
  EXPECT_NEAR(r.lhs, 0.4, 1e-14);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(HeatRegion, DimensionOneAlphaOne) {
  const Interval iv = heat_beta_interval(1, 1.0, 0.0, false);
  EXPECT_EQ(iv.lower, 0.75);
  EXPECT_EQ(iv.upper, 1.5);
  EXPECT_TRUE(iv.lower_open);
  EXPECT_FALSE(iv.upper_open);
  EXPECT_EQ(check_heat_region(1, 1.0, 0.75, 0.0, 0.0, false).verdict, Verdict::fail);
  EXPECT_EQ(check_heat_region(1, 1.0, 1.5, 0.0, 0.0, false).verdict, Verdict::pass);
  EXPECT_EQ(check_heat_region(1, 1.0, 1.25, 0.0, 0.5, false).verdict, Verdict::pass);
  EXPECT_EQ(check_heat_region(3, 1.0, 1.0, 0.0, 0.0, false).verdict, Verdict::fail);
  EXPECT_EQ(check_heat_region(1, 1.0, 1.25, 0.0, 1.2, false).verdict, Verdict::fail);
}

TEST(HeatRegion, PositiveDeltaAndMultiplicative) {
  // alpha = 1: delta < 1/4 and beta > 1/2 + (delta + 1/4)
  EXPECT_EQ(check_heat_region(1, 1.0, 1.4, 0.2, 0.0, false).verdict, Verdict::pass);
  EXPECT_EQ(check_heat_region(1, 1.0, 1.4, 0.25, 0.0, false).verdict, Verdict::fail);
  EXPECT_EQ(check_heat_region(1, 0.6, 1.0, 0.01, 0.0, false).verdict, Verdict::fail);
  EXPECT_EQ(check_heat_region(2, 1.2, 1.6, 0.1, 0.0, false).verdict, Verdict::fail);
  const Interval m = heat_beta_interval(2, 1.0, 0.25, true);
  EXPECT_EQ(m.lower, 1.25);
  EXPECT_EQ(check_heat_region(3, 1.0, 1.3, 0.0, 0.0, true).verdict, Verdict::pass);
  EXPECT_EQ(check_heat_region(3, 1.0, 1.25, 0.0, 0.0, true).verdict, Verdict::fail);
}

TEST(Invariants, MonotoneResponse) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 0.6);
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 40);
  auto rank = [](Verdict v) { return v == Verdict::pass ? 0 : (v == Verdict::inconclusive ? 1 : 2); };
  for (int trial = 0; trial < 25; ++trial) {
    CoefficientConstants c;
    c.C_F_lin = u(gen);
    c.C_sigma_lin = u(gen);
    const auto base1 = check_1d_theorem(-1.0, 0.8, 1.0, c);
    const auto base_g = check_general_limit(op, FractionalPair{0.8, 1.0}, c, 0.0, Variant::limit);
    for (double CoefficientConstants::*field : {&CoefficientConstants::C_F_lin, &CoefficientConstants::C_sigma_lin}) {
      CoefficientConstants up = c;
      up.*field += 0.3;
      const auto r1 = check_1d_theorem(-1.0, 0.8, 1.0, up);
      const auto rg = check_general_limit(op, FractionalPair{0.8, 1.0}, up, 0.0, Variant::limit);
      EXPECT_GE(r1.b.lhs, base1.b.lhs);
      EXPECT_GE(rank(r1.b.verdict), rank(base1.b.verdict));
      EXPECT_GE(r1.a.lhs, base1.a.lhs);
      EXPECT_GE(rg.lhs, base_g.lhs);
      EXPECT_GE(rank(rg.verdict), rank(base_g.verdict));
    }
  }
}

TEST(Invariants, ZeroCoefficientsAlwaysPass) {
  const CoefficientConstants z;
  for (double alpha : {0.3, 0.9, 1.5}) {
    const auto r = check_1d_theorem(-0.5, alpha, 1.0, z);
    EXPECT_EQ(r.a.verdict, Verdict::pass);
    EXPECT_EQ(r.b.verdict, Verdict::pass);
    EXPECT_EQ(check_additive(DiagonalOperator::dirichlet_laplacian(2, 5), alpha, 0.0, 0.3).verdict, Verdict::pass);
    EXPECT_EQ(check_general_limit(DiagonalOperator::dirichlet_laplacian(3, 5), FractionalPair{alpha, 0.6}, z, 2.0,
                                  Variant::stability)
                  .verdict,
              Verdict::pass);
  }
}

TEST(Json, RoundTrip) {
  CoefficientConstants c;
  c.C_sigma_lin = 1.0;
  auto reports = check_1d_theorem(-1.0, 1.0, 1.0, c);
  const auto div = check_general_limit(DiagonalOperator::dirichlet_laplacian(1, 5), FractionalPair{0.8, 1.0},
                                       drift_only(0.1), 0.5, Variant::limit);
  const auto region = check_heat_region(1, 1.0, 1.0, 0.0, 0.0, false);
  for (const auto& r : {reports.b, div, region}) {
    const std::string text = to_json(r);
    const auto back = report_from_json(text);
    EXPECT_EQ(to_json(back), text);
    EXPECT_EQ(back.verdict, r.verdict);
    EXPECT_EQ(back.terms.size(), r.terms.size());
  }
  EXPECT_NE(to_json(div).find("\"inf\""), std::string::npos);
  EXPECT_THROW(report_from_json(R"({"name":"x","lhs":1,"threshold":1,"error_band":0,"verdict":"pass","terms":[],"extra":1})"),
               ValidationError);
  EXPECT_THROW(report_from_json(R"({"name":"x","lhs":1})"), ValidationError);
  EXPECT_THROW(report_from_json("not json"), ValidationError);
}

}  // namespace
