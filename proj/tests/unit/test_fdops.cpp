#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "slv/error.hpp"
#include "slv/fdops.hpp"
#include "slv/mesh.hpp"

namespace {

using slv::BandedMatrix;

TEST(Stencils, CentralFirstUniform) {
    const auto s = slv::central_first(0.1, 0.1);
    EXPECT_DOUBLE_EQ(s.coeffs[0], -5.0);
    EXPECT_DOUBLE_EQ(s.coeffs[1], 0.0);
    EXPECT_DOUBLE_EQ(s.coeffs[2], 5.0);
}

TEST(Stencils, NonUniformCoefficients) {
    const auto c1 = slv::central_first(1.0, 2.0);
    EXPECT_NEAR(c1.coeffs[0], -2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c1.coeffs[1], 0.5, 1e-15);
    EXPECT_NEAR(c1.coeffs[2], 1.0 / 6.0, 1e-15);
    const auto f = slv::forward_first(1.0, 2.0);
    EXPECT_NEAR(f.coeffs[0], -4.0 / 3.0, 1e-15);
    EXPECT_NEAR(f.coeffs[1], 1.5, 1e-15);
    EXPECT_NEAR(f.coeffs[2], -1.0 / 6.0, 1e-15);
    const auto c2 = slv::central_second(1.0, 2.0);
    EXPECT_NEAR(c2.coeffs[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c2.coeffs[1], -1.0, 1e-15);
    EXPECT_NEAR(c2.coeffs[2], 1.0 / 3.0, 1e-15);
}

TEST(Stencils, ExactOnQuadratics) {
    const double xl = -0.3, x0 = 0.1, xr = 0.8, xf = 1.4;
    auto f = [](double x) { return 2.0 + 3.0 * x - 1.5 * x * x; };
    const auto c1 = slv::central_first(x0 - xl, xr - x0);
    const auto c2 = slv::central_second(x0 - xl, xr - x0);
    const auto fw = slv::forward_first(xr - x0, xf - xr);
    EXPECT_NEAR(c1.coeffs[0] * f(xl) + c1.coeffs[1] * f(x0) + c1.coeffs[2] * f(xr), 3.0 - 3.0 * x0, 1e-13);
    EXPECT_NEAR(c2.coeffs[0] * f(xl) + c2.coeffs[1] * f(x0) + c2.coeffs[2] * f(xr), -3.0, 1e-13);
    EXPECT_NEAR(fw.coeffs[0] * f(x0) + fw.coeffs[1] * f(xr) + fw.coeffs[2] * f(xf), 3.0 - 3.0 * x0, 1e-13);
    EXPECT_NEAR(c1.sum(), 0.0, 1e-15);
    EXPECT_NEAR(c2.sum(), 0.0, 1e-15);
}

TEST(Stencils, RejectNonPositiveWidths) {
    EXPECT_THROW(slv::central_first(0.0, 1.0), slv::Error);
    EXPECT_THROW(slv::forward_first(1.0, -1.0), slv::Error);
    EXPECT_THROW(slv::central_second(-1.0, 1.0), slv::Error);
}

TEST(BandedMatrix, ApplyAndTransposeAgreeWithDense) {
    std::mt19937_64 rng(7);
    const std::size_t n = 12;
    BandedMatrix a(n);
    oracle::Dense d(n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = -2; k <= 2; ++k) {
            const long j = static_cast<long>(i) + k;
            if (j < 0 || j >= static_cast<long>(n)) continue;
            a.at(i, k) = d(i, static_cast<std::size_t>(j)) = u(rng);
        }
    const auto x = oracle::random_vector(n, rng);
    std::vector<double> y(n), yt(n);
    a.apply(x, y);
    a.apply_transposed(x, yt);
    EXPECT_LT(oracle::max_abs_diff(y, d.mul(x)), 1e-14);
    EXPECT_LT(oracle::max_abs_diff(yt, d.transposed().mul(x)), 1e-14);
    const BandedMatrix t = a.transposed();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(t.entry(i, j), a.entry(j, i));
    EXPECT_EQ(a.lower_bw(), 2);
    EXPECT_EQ(a.upper_bw(), 2);
}

TEST(XOperators, RowsAnnihilateConstantsAndBandIsNarrow) {
    const slv::Grid1D g = slv::build_grid_x(60, 0.0, -1.0, 1.0, 0.1, 0.02);
    const auto [dx, dxx] = slv::assemble_x_ops(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(dx.row_sum(i), 0.0, 1e-9 * std::abs(dx.entry(i, i == 0 ? 1 : i - 1)) + 1e-12);
        EXPECT_NEAR(dxx.row_sum(i), 0.0, 1e-9 * std::abs(dxx.entry(i, i == 0 ? 1 : i - 1)) + 1e-12);
    }
    EXPECT_LE(dx.lower_bw(), 2);
    EXPECT_LE(dxx.upper_bw(), 2);
}

TEST(XOperators, BoundaryRowsExactForExponentialClosure) {
    const slv::Grid1D g = slv::build_grid_x(40, 0.0, -1.2, 1.5, 0.2);
    const auto [dx, dxx] = slv::assemble_x_ops(g);
    const double c1 = 0.7, c2 = -2.0;
    std::vector<double> u(g.size()), d1(g.size()), d2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = c1 * std::exp(g.nodes[i]) + c2;
    dx.apply(u, d1);
    dxx.apply(u, d2);
    const std::size_t m = g.size();
    for (std::size_t i : {std::size_t{0}, m - 1}) {
        EXPECT_NEAR(d1[i], c1 * std::exp(g.nodes[i]), 1e-11);
        EXPECT_NEAR(d2[i], c1 * std::exp(g.nodes[i]), 1e-11);
    }
}

TEST(XOperators, UniformInteriorIsClassical) {
    std::vector<double> nodes;
    for (int i = 0; i <= 10; ++i) nodes.push_back(-1.0 + 0.2 * i);
    const auto g = oracle::grid_from_nodes(nodes, 5);
    const auto [dx, dxx] = slv::assemble_x_ops(g);
    for (std::size_t i = 1; i < 10; ++i) {
        EXPECT_NEAR(dx.entry(i, i - 1), -2.5, 1e-12);
        EXPECT_NEAR(dx.entry(i, i + 1), 2.5, 1e-12);
        EXPECT_NEAR(dxx.entry(i, i - 1), 25.0, 1e-10);
        EXPECT_NEAR(dxx.entry(i, i), -50.0, 1e-10);
    }
}

double second_derivative_error(std::size_t m) {
    const slv::Grid1D g = slv::build_grid_x(m, 0.0, -1.0, 1.0, 0.2, 0.1);
    const auto [dx, dxx] = slv::assemble_x_ops(g);
    std::vector<double> u(m), d(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = std::sin(2.0 * g.nodes[i]);
    dxx.apply(u, d);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i) e = std::max(e, std::abs(d[i] + 4.0 * std::sin(2.0 * g.nodes[i])));
    return e;
}

TEST(XOperators, SecondDerivativeIsSecondOrderOnSmoothMesh) {
    const double order = std::log2(second_derivative_error(201) / second_derivative_error(401));
    EXPECT_GT(order, 1.8);
}

TEST(VOperators, PositiveAlphaBoundaryRows) {
    std::vector<double> nodes{0.0, 1.0, 3.0, 4.0, 6.0, 7.5};
    const auto g = oracle::grid_from_nodes(nodes, 1);
    const auto [dv, dvv] = slv::assemble_v_ops(g, 0.5);
    EXPECT_NEAR(dv.entry(0, 0), -4.0 / 3.0, 1e-15);
    EXPECT_NEAR(dv.entry(0, 1), 1.5, 1e-15);
    EXPECT_NEAR(dv.entry(0, 2), -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(dv.entry(5, 4), -1.0 / 1.5, 1e-15);
    EXPECT_NEAR(dv.entry(5, 5), 1.0 / 1.5, 1e-15);
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_EQ(dvv.entry(0, j), 0.0);
        EXPECT_EQ(dvv.entry(5, j), 0.0);
    }
}

TEST(VOperators, ZeroAlphaRowsAnnihilateConstants) {
    const slv::Grid1D g = slv::build_grid_v(30, 0.0, -2.0, 2.0, 0.5, 0.0);
    const auto [dv, dvv] = slv::assemble_v_ops(g, 0.0);
    std::vector<double> one(g.size(), 1.0), out(g.size());
    dv.apply(one, out);
    EXPECT_LT(oracle::max_abs(out), 1e-9);
    dvv.apply(one, out);
    EXPECT_LT(oracle::max_abs(out), 1e-8);
    EXPECT_NE(dvv.entry(g.size() - 1, g.size() - 1), 0.0);
}

}  // namespace
