#include "slv/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "slv/error.hpp"
#include "slv/timestep.hpp"

namespace slv {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double bs_vega(double s0, double strike, double maturity, double rd, double rf, double sigma) {
    const double sd = sigma * std::sqrt(maturity);
    const double d1 = (std::log(s0 / strike) + (rd - rf) * maturity) / sd + 0.5 * sd;
    return s0 * std::exp(-rf * maturity) * norm_pdf(d1) * std::sqrt(maturity);
}

}  // namespace

std::vector<double> call_payoff(const Grid1D& gx, double strike, double s0) {
    require(strike > 0.0 && s0 > 0.0, ErrorCode::invalid_argument, "strike and spot must be positive");
    std::vector<double> u(gx.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::max(s0 * std::exp(gx.nodes[i]) - strike, 0.0);
    return u;
}

std::vector<double> put_payoff(const Grid1D& gx, double strike, double s0) {
    require(strike > 0.0 && s0 > 0.0, ErrorCode::invalid_argument, "strike and spot must be positive");
    std::vector<double> u(gx.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::max(strike - s0 * std::exp(gx.nodes[i]), 0.0);
    return u;
}

std::pair<ValueGrid, std::vector<double>> call_payoff_grids(const Grid2D& grid, double strike, double s0) {
    std::vector<double> line = call_payoff(grid.gx, strike, s0);
    ValueGrid u;
    u.data.resize(grid.size());
    for (std::size_t j = 0; j < grid.m2(); ++j) std::copy(line.begin(), line.end(), u.data.begin() + j * grid.m1());
    return {std::move(u), std::move(line)};
}

double bs_call(double s0, double strike, double maturity, double rd, double rf, double sigma) {
    require(s0 > 0.0 && strike > 0.0 && maturity > 0.0 && sigma > 0.0, ErrorCode::invalid_argument,
            "bs_call: spot, strike, maturity and vol must be positive");
    const double sd = sigma * std::sqrt(maturity);
    const double d1 = (std::log(s0 / strike) + (rd - rf) * maturity) / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    return s0 * std::exp(-rf * maturity) * norm_cdf(d1) - strike * std::exp(-rd * maturity) * norm_cdf(d2);
}

double implied_vol(double price, double s0, double strike, double maturity, double rd, double rf) {
    require(std::isfinite(price), ErrorCode::out_of_range, "implied vol: price is not finite");
    const double upper = s0 * std::exp(-rf * maturity);
    const double lower = std::max(upper - strike * std::exp(-rd * maturity), 0.0);
    if (price <= lower)
        throw Error(ErrorCode::out_of_range, "implied vol: price " + std::to_string(price) +
                                                 " is not above the lower (intrinsic) bound " + std::to_string(lower));
    if (price >= upper)
        throw Error(ErrorCode::out_of_range, "implied vol: price " + std::to_string(price) +
                                                 " is not below the upper bound " + std::to_string(upper));

    double lo = 1e-4, hi = 5.0;
    const double f_lo = bs_call(s0, strike, maturity, rd, rf, lo) - price;
    const double f_hi = bs_call(s0, strike, maturity, rd, rf, hi) - price;
    if (f_lo > 0.0) throw Error(ErrorCode::out_of_range, "implied vol: price is below the vol floor 1e-4");
    if (f_hi < 0.0) throw Error(ErrorCode::out_of_range, "implied vol: price is above the vol cap 5");

    double sigma = std::clamp(0.2, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double f = bs_call(s0, strike, maturity, rd, rf, sigma) - price;
        if (f == 0.0) return sigma;
        if (f < 0.0)
            lo = sigma;
        else
            hi = sigma;
        if (hi - lo <= 1e-15 * hi) return sigma;
        const double vega = bs_vega(s0, strike, maturity, rd, rf, sigma);
        double next = vega > 0.0 ? sigma - f / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        // Stop on the step, not on f: deep out of the money the vega is tiny
        // and a small price residual still hides a sizeable vol error.
        if (std::abs(next - sigma) <= 1e-14 * sigma) return next;
        sigma = next;
    }
    return sigma;
}

double PriceReport::max_abs_rel_error() const {
    double m = 0.0;
    for (const auto& r : rows)
        for (std::size_t k = 1; k < route_count; ++k) m = std::max(m, std::abs(r.rel_error[k]));
    return m;
}

double PriceReport::max_iv_error() const {
    double m = 0.0;
    for (std::size_t k = 1; k < route_count; ++k) m = std::max(m, max_iv_error(static_cast<Route>(k)));
    return m;
}

double PriceReport::max_iv_error(Route r) const {
    double m = 0.0;
    for (const auto& row : rows) m = std::max(m, row.iv_error[static_cast<std::size_t>(r)]);
    return m;
}

std::vector<double> default_strike_ladder() { return {0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3}; }

double price_lv_backward(const Grid1D& gx, const DiffOps& ops, const SlvParams& params, const LvSurface& lv,
                         std::span<const double> payoff, const PricingConfig& cfg) {
    const std::size_t n = step_count(params.maturity, cfg.dtau);
    const LvOperator op = backward_lv_operator(gx, ops, lv, params);
    const std::vector<double> u =
        integrate(op, std::vector<double>(payoff.begin(), payoff.end()), 0.0, cfg.dtau, n, cfg.rannacher_steps);
    return u[gx.spot_index];
}

std::vector<double> lv_forward_density(const Grid1D& gx, const DiffOps& ops, const SlvParams& params,
                                       const LvSurface& lv, const PricingConfig& cfg) {
    const std::size_t n = step_count(params.maturity, cfg.dtau);
    const LvOperator op = forward_lv_operator(gx, ops, lv, params);
    return integrate(op, dirac_density(gx).data, 0.0, cfg.dtau, n, cfg.rannacher_steps);
}

std::vector<double> slv_backward_values(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                        const LeverageSurface& leverage, std::span<const double> payoff_x,
                                        const PricingConfig& cfg) {
    require(payoff_x.size() == grid.m1(), ErrorCode::invalid_argument, "payoff does not match the x mesh");
    const std::size_t n = step_count(params.maturity, cfg.dtau);
    const SlvOperator op = backward_slv_operator(grid, ops, params, leverage.function());
    std::vector<double> u(grid.size());
    for (std::size_t j = 0; j < grid.m2(); ++j) std::copy(payoff_x.begin(), payoff_x.end(), u.begin() + j * grid.m1());
    return integrate(op, std::move(u), 0.0, cfg.dtau, McsConfig{cfg.theta, n, cfg.rannacher_steps}, {}, cfg.implicit);
}

std::vector<double> slv_forward_density(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                        const LeverageSurface& leverage, const PricingConfig& cfg) {
    const std::size_t n = step_count(params.maturity, cfg.dtau);
    const SlvOperator op = adjoint_forward_operator(grid, ops, params, leverage.function());
    return integrate(op, dirac_density(grid).data, 0.0, cfg.dtau, McsConfig{cfg.theta, n, cfg.rannacher_steps}, {},
                     cfg.implicit);
}

PriceReport price_four_routes(const Grid2D& grid, const DiffOps& ops, const SlvParams& params, const LvSurface& lv,
                              const LeverageSurface& leverage, std::span<const double> k_over_s0,
                              const PricingConfig& cfg) {
    params.validate();
    require(!k_over_s0.empty(), ErrorCode::invalid_argument, "no strikes to price");
    leverage.check_compatible(grid.gx, cfg.dtau, params.maturity);
    require(leverage.stamp().rannacher_steps == cfg.rannacher_steps, ErrorCode::stamp_mismatch,
            "leverage surface was built with a different Rannacher start-up");

    PriceReport report;
    report.maturity = params.maturity;
    report.discount = std::exp(-params.rd * params.maturity);

    const std::vector<double> p_lv = lv_forward_density(grid.gx, ops, params, lv, cfg);
    const std::vector<double> p_slv = slv_forward_density(grid, ops, params, leverage, cfg);
    const std::size_t spot = grid.index(grid.gx.spot_index, grid.gv.spot_index);

    for (double k : k_over_s0) {
        require(k > 0.0, ErrorCode::invalid_argument, "strike ratios must be positive");
        PriceRow row;
        row.k_over_s0 = k;
        row.strike = k * params.s0;
        auto [u2, u1] = call_payoff_grids(grid, row.strike, params.s0);

        row.fv[0] = price_lv_backward(grid.gx, ops, params, lv, u1, cfg);
        row.fv[1] = duality_value(p_lv, u1);
        row.fv[2] = slv_backward_values(grid, ops, params, leverage, u1, cfg)[spot];
        row.fv[3] = duality_value(p_slv, u2.data);

        for (std::size_t m = 0; m < route_count; ++m) {
            row.fv_disc[m] = report.discount * row.fv[m];
            row.rel_error[m] = (row.fv[m] - row.fv[0]) / row.fv[0];
            row.iv_percent[m] =
                100.0 * implied_vol(row.fv_disc[m], params.s0, row.strike, params.maturity, params.rd, params.rf);
        }
        for (std::size_t m = 0; m < route_count; ++m) row.iv_error[m] = std::abs(row.iv_percent[m] - row.iv_percent[0]);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace slv
