#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "slv/error.hpp"
#include "slv/semidiscrete.hpp"

namespace {

using slv::Part;

struct Fixture {
    slv::SlvParams params;
    slv::Grid2D grid;
    slv::DiffOps ops;
    std::vector<double> lev;

    explicit Fixture(int case_id, std::size_t m1 = 14, std::size_t m2 = 10) : params(slv::case_params(case_id)) {
        grid = slv::build_grid(slv::default_grid_spec(params, m1, m2));
        ops = slv::assemble_ops(grid, params.psi.alpha());
        std::mt19937_64 rng(11);
        lev = oracle::random_vector(m1, rng, 0.5, 2.0);
    }

    slv::LeverageFn leverage() const {
        // tau-dependent on purpose
        return [l = lev](double tau, std::span<double> out) {
            for (std::size_t i = 0; i < l.size(); ++i) out[i] = l[i] * (1.0 + 0.1 * tau);
        };
    }
};

oracle::Dense dense_from(const slv::SlvOperator& op, double t) {
    oracle::Dense d(op.size());
    for (const auto& e : op.entries(t)) d(e.row, e.col) += e.value;
    return d;
}

// Sum of |A_kl a_l b_k|: the natural scale of rounding in both inner products.
double rounding_scale(const oracle::Dense& a, const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.n; ++k)
        for (std::size_t l = 0; l < a.n; ++l) s += std::abs(a(k, l) * x[l] * y[k]);
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<long double>(a[k]) * b[k];
    return static_cast<double>(s);
}

TEST(SlvOperator, EntriesMatchMatrixFreeApplication) {
    for (int c : {1, 2}) {
        Fixture s(c);
        for (auto dir : {slv::Direction::backward, slv::Direction::forward}) {
            const slv::SlvOperator op(s.grid, s.ops, s.params, s.leverage(), dir);
            std::mt19937_64 rng(5);
            const auto a = oracle::random_vector(op.size(), rng);
            std::vector<double> y(op.size());
            op.apply_full(0.2, a, y);
            const auto d = dense_from(op, 0.2);
            EXPECT_LT(oracle::max_abs_diff(y, d.mul(a)), 1e-13 * rounding_scale(d, a, std::vector<double>(a.size(), 1.0)));
        }
    }
}

TEST(SlvOperator, ForwardIsTransposeOfBackward) {
    Fixture s(1);
    const auto b = slv::backward_slv_operator(s.grid, s.ops, s.params, s.leverage());
    const auto f = slv::adjoint_forward_operator(s.grid, s.ops, s.params, s.leverage());
    // Same calendar time: backward scheme time T - tau, forward tau.
    const double tau = 0.1;
    const auto db = dense_from(b, s.params.maturity - tau);
    const auto df = dense_from(f, tau);
    for (std::size_t i = 0; i < db.n; ++i)
        for (std::size_t j = 0; j < db.n; ++j) EXPECT_NEAR(df(j, i), db(i, j), 1e-12 * (1.0 + std::abs(db(i, j))));
}

TEST(SlvOperator, AdjointIdentityPerPartWithinRounding) {
    for (int c : {1, 2, 3, 4}) {
        Fixture s(c);
        const auto b = slv::backward_slv_operator(s.grid, s.ops, s.params, s.leverage());
        const auto f = slv::adjoint_forward_operator(s.grid, s.ops, s.params, s.leverage());
        std::mt19937_64 rng(100 + c);
        const double tau = 0.05 * c;
        const auto db = dense_from(b, s.params.maturity - tau);
        for (Part p : {Part::mixed, Part::x, Part::v}) {
            const auto x = oracle::random_vector(b.size(), rng);
            const auto y = oracle::random_vector(b.size(), rng);
            std::vector<double> fx(b.size()), by(b.size());
            f.apply(p, tau, x, fx);
            b.apply(p, s.params.maturity - tau, y, by);
            EXPECT_LE(std::abs(dot(fx, y) - dot(x, by)), 1e-14 * rounding_scale(db, x, y) + 1e-300)
                << "case " << c << " part " << static_cast<int>(p);
        }
    }
}

TEST(SlvOperator, BackwardAnnihilatesConstantsSoForwardConservesMass) {
    Fixture s(2);
    const auto b = slv::backward_slv_operator(s.grid, s.ops, s.params, s.leverage());
    const auto f = slv::adjoint_forward_operator(s.grid, s.ops, s.params, s.leverage());
    std::vector<double> one(b.size(), 1.0), out(b.size());
    b.apply_full(0.1, one, out);
    const auto d = dense_from(b, 0.1);
    double row_norm = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < d.n; ++j) r += std::abs(d(i, j));
        row_norm = std::max(row_norm, r);
    }
    EXPECT_LT(oracle::max_abs(out), 1e-14 * row_norm);
    std::mt19937_64 rng(3);
    const auto p = oracle::random_vector(b.size(), rng, 0.0, 1.0);
    f.apply_full(0.1, p, out);
    EXPECT_LT(std::abs(slv::total_mass(out)), 1e-14 * rounding_scale(d, p, one));
}

TEST(SlvOperator, DirectionalSolvesInvertTheirParts) {
    Fixture s(4);
    for (auto dir : {slv::Direction::backward, slv::Direction::forward}) {
        const slv::SlvOperator op(s.grid, s.ops, s.params, s.leverage(), dir);
        std::mt19937_64 rng(8);
        const auto rhs = oracle::random_vector(op.size(), rng);
        for (Part p : {Part::x, Part::v}) {
            std::vector<double> w(op.size()), aw(op.size());
            const double c = 0.003;
            op.solve(p, 0.3, c, rhs, w);
            op.apply(p, 0.3, w, aw);
            for (std::size_t k = 0; k < w.size(); ++k) aw[k] = w[k] - c * aw[k];
            EXPECT_LT(oracle::max_abs_diff(aw, rhs), 1e-10);
        }
        std::vector<double> sink(op.size());
        EXPECT_THROW(op.solve(Part::mixed, 0.3, 0.1, rhs, sink), slv::Error);
    }
}

TEST(SlvOperator, ZeroCorrelationHasNoMixedTerm) {
    Fixture s(1);
    s.params.rho = 0.0;
    const auto b = slv::backward_slv_operator(s.grid, s.ops, s.params, s.leverage());
    std::mt19937_64 rng(2);
    const auto a = oracle::random_vector(b.size(), rng);
    std::vector<double> out(b.size(), 1.0);
    b.apply(Part::mixed, 0.0, a, out);
    EXPECT_EQ(oracle::max_abs(out), 0.0);
}

TEST(SlvOperator, RejectsNonPositiveLeverage) {
    Fixture s(1);
    const auto b = slv::backward_slv_operator(s.grid, s.ops, s.params,
                                              [](double, std::span<double> o) { std::fill(o.begin(), o.end(), 0.0); });
    std::vector<double> a(b.size(), 1.0), out(b.size());
    EXPECT_THROW(b.apply(Part::x, 0.0, a, out), slv::Error);
}

TEST(LvOperator, FlatVolHandCheckOnExponential) {
    // For u = e^x the continuous operator gives (rd - rf) e^x; boundary rows are exact.
    const auto p = slv::case_params(1);
    const slv::Grid1D gx = slv::build_grid_x(80, 0.0, -1.0, 1.0, 0.2, 0.05);
    auto [dx, dxx] = slv::assemble_x_ops(gx);
    const slv::LvOperator op(gx, dx, dxx, slv::flat_lv_surface(0.2, 1.0), p.rd, p.rf, 1.0, slv::Direction::backward);
    std::vector<double> u(gx.size()), out(gx.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(gx.nodes[i]);
    op.apply(0.0, u, out);
    const double drift = p.rd - p.rf;
    EXPECT_NEAR(out.front(), drift * u.front(), 1e-12);
    EXPECT_NEAR(out.back(), drift * u.back(), 1e-12);
    for (std::size_t i = 1; i + 1 < u.size(); ++i) EXPECT_NEAR(out[i], drift * u[i], 2e-3 * u[i]);
}

TEST(LvOperator, ForwardIsTransposeAndConservesMass) {
    const auto p = slv::case_params(1);
    const slv::Grid1D gx = slv::build_grid_x(40, 0.0, -1.0, 1.0, 0.2, 0.05);
    const slv::DiffOps ops{slv::assemble_x_ops(gx).first, slv::assemble_x_ops(gx).second, {}, {}};
    const auto lv = slv::smile_lv_surface(p.maturity);
    const auto b = slv::backward_lv_operator(gx, ops, lv, p);
    const auto f = slv::forward_lv_operator(gx, ops, lv, p);
    const double tau = 0.2;
    const auto mb = b.matrix(p.maturity - tau);
    const auto mf = f.matrix(tau);
    for (std::size_t i = 0; i < gx.size(); ++i)
        for (std::size_t j = 0; j < gx.size(); ++j) EXPECT_EQ(mb.entry(i, j), mf.entry(i, j));
    std::mt19937_64 rng(4);
    const auto x = oracle::random_vector(gx.size(), rng, 0.0, 1.0);
    std::vector<double> y(gx.size());
    f.apply(tau, x, y);
    double scale = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) scale += std::abs(mb.entry(i, i)) * x[i];
    EXPECT_LT(std::abs(slv::total_mass(y)), 1e-14 * scale);
}

TEST(Density, DiracStartAndPeak) {
    Fixture s(1);
    const auto d = slv::dirac_density(s.grid);
    EXPECT_EQ(slv::total_mass(d.data), 1.0);
    EXPECT_EQ(d.data[s.grid.index(s.grid.gx.spot_index, s.grid.gv.spot_index)], 1.0);
    EXPECT_DOUBLE_EQ(slv::dirac_peak(s.grid), 1.0 / (s.grid.gx.weights[s.grid.gx.spot_index] *
                                                     s.grid.gv.weights[s.grid.gv.spot_index]));
}

TEST(Density, CompensatedSums) {
    const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    EXPECT_EQ(slv::total_mass(v), 2.0);
    EXPECT_EQ(slv::duality_value(v, std::vector<double>(4, 1.0)), 2.0);
    EXPECT_THROW(slv::duality_value(v, std::vector<double>(3, 1.0)), slv::Error);
}

}  // namespace
