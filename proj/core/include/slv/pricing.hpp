#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "slv/calibrate.hpp"
#include "slv/mesh.hpp"
#include "slv/model.hpp"
#include "slv/semidiscrete.hpp"

namespace slv {

enum class Route : std::size_t { lvb = 0, lvf = 1, slvb = 2, slvf = 3 };
inline constexpr std::size_t route_count = 4;

/// U(0) = max(S0 e^x - K, 0) on the 2-D grid (constant in v) and on the x mesh.
std::pair<ValueGrid, std::vector<double>> call_payoff_grids(const Grid2D& grid, double strike, double s0);
std::vector<double> call_payoff(const Grid1D& gx, double strike, double s0);
std::vector<double> put_payoff(const Grid1D& gx, double strike, double s0);

/// Discounted Garman-Kohlhagen call price.
double bs_call(double s0, double strike, double maturity, double rd, double rf, double sigma);

/// Black-Scholes volatility (decimal, per sqrt year) reproducing a discounted
/// call price. Throws out_of_range if the price violates the no-arbitrage
/// bounds or lies outside the prices of vols in [1e-4, 5].
double implied_vol(double price, double s0, double strike, double maturity, double rd, double rf);

struct PriceRow {
    double k_over_s0 = 0.0;
    double strike = 0.0;
    std::array<double, route_count> fv{};           // non-discounted
    std::array<double, route_count> fv_disc{};      // discounted by e^{-rd T}
    std::array<double, route_count> rel_error{};    // (FV_m - FV_LVB) / FV_LVB
    std::array<double, route_count> iv_percent{};   // implied vol in percent
    std::array<double, route_count> iv_error{};     // |iv_m - iv_LVB| in vol points
};

struct PriceReport {
    double maturity = 0.0;
    double discount = 1.0;
    std::vector<PriceRow> rows;

    double max_abs_rel_error() const;
    double max_iv_error() const;
    double max_iv_error(Route r) const;
};

struct PricingConfig {
    double dtau = 1.0 / 200.0;
    double theta = 1.0 / 3.0;
    std::size_t rannacher_steps = 2;
    ImplicitOptions implicit{};
};

std::vector<double> default_strike_ladder();

/// Prices calls at strikes k * S0 by the four routes: LV backward and forward
/// (Crank-Nicolson), SLV backward and forward (MCS) with the calibrated leverage.
PriceReport price_four_routes(const Grid2D& grid, const DiffOps& ops, const SlvParams& params, const LvSurface& lv,
                              const LeverageSurface& leverage, std::span<const double> k_over_s0,
                              const PricingConfig& cfg);

/// Individual routes, non-discounted, for one payoff on the x mesh.
double price_lv_backward(const Grid1D& gx, const DiffOps& ops, const SlvParams& params, const LvSurface& lv,
                         std::span<const double> payoff, const PricingConfig& cfg);
std::vector<double> lv_forward_density(const Grid1D& gx, const DiffOps& ops, const SlvParams& params,
                                       const LvSurface& lv, const PricingConfig& cfg);
/// U(T) on the whole 2-D grid for a payoff depending on x only.
std::vector<double> slv_backward_values(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                        const LeverageSurface& leverage, std::span<const double> payoff_x,
                                        const PricingConfig& cfg);
std::vector<double> slv_forward_density(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                        const LeverageSurface& leverage, const PricingConfig& cfg);

}  // namespace slv
