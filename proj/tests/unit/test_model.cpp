#include <gtest/gtest.h>

#include <cmath>

#include "slv/error.hpp"
#include "slv/model.hpp"

namespace {

using slv::PsiFamily;
using slv::PsiKind;

TEST(Params, CaseValues) {
    const auto p1 = slv::case_params(1);
    EXPECT_DOUBLE_EQ(p1.kappa, 3.02);
    EXPECT_DOUBLE_EQ(p1.v0, p1.eta);
    EXPECT_DOUBLE_EQ(p1.xi(), 0.75 * 0.41);
    EXPECT_DOUBLE_EQ(p1.s0, 1.0764);
    const auto p4 = slv::case_params(4);
    EXPECT_DOUBLE_EQ(p4.maturity, 2.0);
    EXPECT_DOUBLE_EQ(p4.xi(), 1.0);
    EXPECT_THROW(slv::case_params(5), slv::Error);
}

TEST(Params, FellerIndicators) {
    // 2 kappa eta - xi^2: strongly negative for the high vol-of-vol sets,
    // marginal for the first set, zero (to rounding) for the third.
    EXPECT_NEAR(slv::case_params(2).feller_indicator(), -0.82, 1e-12);
    EXPECT_NEAR(slv::case_params(4).feller_indicator(), -0.82, 1e-12);
    EXPECT_NEAR(slv::case_params(1).feller_indicator(), 2 * 3.02 * 0.015 - 0.3075 * 0.3075, 1e-12);
    EXPECT_LT(std::abs(slv::case_params(1).feller_indicator()), 0.01);
    EXPECT_NEAR(slv::case_params(3).feller_indicator(), 0.0, 1e-15);
}

TEST(Params, ValidationRejectsBadValues) {
    auto p = slv::case_params(1);
    p.rho = 1.5;
    EXPECT_THROW(p.validate(), slv::Error);
    p = slv::case_params(1);
    p.maturity = 0.0;
    EXPECT_THROW(p.validate(), slv::Error);
    p = slv::case_params(1);
    p.mu = 0.0;
    EXPECT_NO_THROW(p.validate());
}

TEST(Psi, Families) {
    const PsiFamily s{PsiKind::sqrt}, l{PsiKind::linear}, e{PsiKind::exp}, u{PsiKind::unit};
    EXPECT_DOUBLE_EQ(s.alpha(), 0.5);
    EXPECT_DOUBLE_EQ(l.alpha(), 1.0);
    EXPECT_DOUBLE_EQ(e.alpha(), 0.0);
    EXPECT_DOUBLE_EQ(u.alpha(), 0.0);
    EXPECT_EQ(s.psi_sq(0.09), 0.09);
    EXPECT_DOUBLE_EQ(s.psi(0.09), 0.3);
    EXPECT_EQ(s.psi(0.0), 0.0);
    EXPECT_DOUBLE_EQ(l.psi_sq(0.3), 0.09);
    EXPECT_DOUBLE_EQ(e.psi_sq(0.25), std::exp(0.5));
    EXPECT_EQ(u.psi_sq(-3.0), 1.0);
    EXPECT_EQ(e.v_pow_alpha(-2.0), 1.0);
    EXPECT_DOUBLE_EQ(s.v_pow_two_alpha(0.04), 0.04);
}

TEST(Psi, ParseNames) {
    EXPECT_EQ(slv::parse_psi_kind("sqrt"), PsiKind::sqrt);
    EXPECT_EQ(slv::parse_psi_kind("heston"), PsiKind::sqrt);
    EXPECT_EQ(slv::parse_psi_kind("exp"), PsiKind::exp);
    EXPECT_EQ(slv::parse_psi_kind("unit"), PsiKind::unit);
    EXPECT_EQ(slv::to_string(PsiKind::linear), "linear");
    EXPECT_THROW(slv::parse_psi_kind("cubic"), slv::Error);
}

TEST(LvSurface, BilinearInsideConstantOutside) {
    const slv::LvSurface s({0.0, 1.0}, {0.0, 1.0}, {0.1, 0.2, 0.1, 0.2});
    EXPECT_DOUBLE_EQ(s(0.5, 0.5), 0.15);
    EXPECT_DOUBLE_EQ(s(0.0, 0.0), 0.1);
    EXPECT_DOUBLE_EQ(s(-4.0, 7.0), 0.2);
    EXPECT_DOUBLE_EQ(s(3.0, -1.0), 0.1);
    const slv::LvSurface t({0.0, 2.0}, {0.0}, {0.1, 0.3});
    EXPECT_DOUBLE_EQ(t(0.5, 0.3), 0.15);
}

TEST(LvSurface, FlatAndSmile) {
    const auto flat = slv::flat_lv_surface(0.1, 1.0);
    EXPECT_DOUBLE_EQ(flat(0.37, 0.61), 0.1);
    const auto smile = slv::smile_lv_surface(2.0);
    for (double tau : {0.0, 0.3, 1.7})
        EXPECT_NEAR(smile(0.0, tau), 0.1, 1e-15);
    // base + 0.5 x^2 e^{-tau} at a sample node
    EXPECT_NEAR(smile(0.5, 0.0), 0.1 + 0.5 * 0.25, 1e-15);
    EXPECT_NEAR(smile(0.5, 1.0), 0.1 + 0.125 * std::exp(-1.0), 1e-15);
    for (double x = -3.0; x <= 3.0; x += 0.1) {
        EXPECT_GE(smile(x, 0.0), 0.05);
        EXPECT_LE(smile(x, 0.0), 0.5);
    }
    const auto v = slv::lv_eval(smile, std::vector<double>{-0.5, 0.0, 0.5}, 1.0);
    EXPECT_DOUBLE_EQ(v[0], v[2]);
}

TEST(LvSurface, RejectsMalformedInput) {
    EXPECT_THROW(slv::LvSurface({0.0, 1.0}, {0.0}, {0.1}), slv::Error);
    EXPECT_THROW(slv::LvSurface({1.0, 0.0}, {0.0}, {0.1, 0.1}), slv::Error);
    EXPECT_THROW(slv::LvSurface({0.0, 1.0}, {0.0}, {0.1, -0.1}), slv::Error);
    EXPECT_THROW(slv::flat_lv_surface(0.0, 1.0), slv::Error);
}

TEST(GridSpec, DefaultsScaleWithMaturity) {
    const auto p = slv::case_params(3);
    const auto g = slv::default_grid_spec(p);
    const double s = 0.2 * std::sqrt(2.0);
    EXPECT_NEAR(g.x_max, 5.0 * s, 1e-14);
    EXPECT_NEAR(g.x_min, -5.0 * s, 1e-14);
    EXPECT_EQ(g.v_min, 0.0);
    EXPECT_EQ(g.v_max, 5.0);
    EXPECT_EQ(g.v0, p.v0);
    auto u = p;
    u.psi.kind = PsiKind::unit;
    const auto gu = slv::default_grid_spec(u);
    EXPECT_NEAR(gu.v_min, p.v0 - 2.0, 1e-15);
    EXPECT_EQ(gu.alpha, 0.0);
}

}  // namespace
