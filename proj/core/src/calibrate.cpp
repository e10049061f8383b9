#include "slv/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slv/error.hpp"

namespace slv {

void CalibConfig::validate() const {
    require(q >= 1, ErrorCode::config, "Q must be at least 1");
    require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::config, "epsilon must be positive");
    require(dtau > 0.0 && std::isfinite(dtau), ErrorCode::config, "dtau must be positive");
    require(theta > 0.0 && std::isfinite(theta), ErrorCode::config, "theta must be positive");
    require(implicit.tolerance > 0.0 && implicit.max_sweeps >= 1, ErrorCode::config,
            "invalid implicit solver options");
}

Expectation conditional_expectation(const double* row, std::size_t stride, std::span<const double> v_nodes,
                                    const PsiFamily& psi, double eta, double epsilon) {
    Expectation e;
    for (std::size_t j = 0; j < v_nodes.size(); ++j) {
        const double p = row[j * stride];
        e.numerator += psi.psi_sq(v_nodes[j]) * p;
        e.denominator += p;
    }
    e.fallback = e.numerator < 0.0 || e.denominator < 0.0;
    e.value = (e.numerator + psi.psi_sq(eta) * epsilon) / (e.denominator + epsilon);
    return e;
}

Expectation conditional_expectation(std::span<const double> row, std::span<const double> v_nodes,
                                    const PsiFamily& psi, double eta, double epsilon) {
    require(row.size() == v_nodes.size(), ErrorCode::invalid_argument,
            "conditional expectation: row and v mesh differ in size");
    return conditional_expectation(row.data(), 1, v_nodes, psi, eta, epsilon);
}

std::vector<Expectation> conditional_expectations(const Grid2D& grid, std::span<const double> pbar,
                                                  const PsiFamily& psi, double eta, double epsilon) {
    require(pbar.size() == grid.size(), ErrorCode::invalid_argument, "density does not match the grid");
    std::vector<Expectation> out(grid.m1());
    for (std::size_t i = 0; i < grid.m1(); ++i)
        out[i] = conditional_expectation(&pbar[i], grid.m1(), grid.gv.nodes, psi, eta, epsilon);
    return out;
}

std::vector<double> leverage_update(std::span<const double> lv_values, std::span<const double> expectations) {
    require(lv_values.size() == expectations.size(), ErrorCode::invalid_argument,
            "leverage update: size mismatch");
    std::vector<double> out(lv_values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(expectations[i] > 0.0) || !std::isfinite(expectations[i]))
            throw Error(ErrorCode::calibration, "nonpositive conditional expectation at x index " +
                                                    std::to_string(i) + ": " + std::to_string(expectations[i]));
        out[i] = lv_values[i] / std::sqrt(expectations[i]);
    }
    return out;
}

LeverageSurface::LeverageSurface(std::vector<double> x_nodes, LeverageStamp stamp)
    : x_(std::move(x_nodes)), stamp_(stamp) {
    require(!x_.empty(), ErrorCode::invalid_argument, "leverage surface needs x nodes");
}

std::size_t LeverageSurface::add_level(double tau, std::vector<double> values) {
    require(values.size() == x_.size(), ErrorCode::invalid_argument, "leverage level has the wrong size");
    require(taus_.empty() || tau > taus_.back(), ErrorCode::invalid_argument,
            "leverage levels must be added in increasing time");
    taus_.push_back(tau);
    values_.push_back(std::move(values));
    return taus_.size() - 1;
}

std::size_t LeverageSurface::find_level(double tau) const {
    const double tol = stamp_.dtau > 0.0 ? 1e-6 * stamp_.dtau : 1e-12;
    auto it = std::lower_bound(taus_.begin(), taus_.end(), tau - tol);
    if (it != taus_.end() && std::abs(*it - tau) <= tol) return static_cast<std::size_t>(it - taus_.begin());
    return taus_.size();
}

void LeverageSurface::eval(double tau, std::span<double> out) const {
    require(!taus_.empty(), ErrorCode::invalid_argument, "leverage surface has no levels");
    require(out.size() == x_.size(), ErrorCode::invalid_argument, "leverage query has the wrong size");
    const std::size_t k = find_level(tau);
    if (k < taus_.size()) {
        std::copy(values_[k].begin(), values_[k].end(), out.begin());
        return;
    }
    if (tau <= taus_.front()) {
        std::copy(values_.front().begin(), values_.front().end(), out.begin());
        return;
    }
    if (tau >= taus_.back()) {
        std::copy(values_.back().begin(), values_.back().end(), out.begin());
        return;
    }
    const auto hi = static_cast<std::size_t>(std::upper_bound(taus_.begin(), taus_.end(), tau) - taus_.begin());
    const std::size_t lo = hi - 1;
    const double w = (tau - taus_[lo]) / (taus_[hi] - taus_[lo]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * values_[lo][i] + w * values_[hi][i];
}

LeverageFn LeverageSurface::function() const {
    return [this](double tau, std::span<double> out) { eval(tau, out); };
}

void LeverageSurface::check_compatible(const Grid1D& gx, double dtau, double maturity) const {
    require(gx.size() == x_.size(), ErrorCode::stamp_mismatch,
            "leverage surface has " + std::to_string(x_.size()) + " x nodes, grid has " +
                std::to_string(gx.size()));
    for (std::size_t i = 0; i < x_.size(); ++i)
        require(std::abs(gx.nodes[i] - x_[i]) <= 1e-12 * std::max(1.0, std::abs(x_[i])), ErrorCode::stamp_mismatch,
                "leverage surface x mesh differs from the pricing grid at index " + std::to_string(i));
    require(std::abs(stamp_.dtau - dtau) <= 1e-12 * dtau, ErrorCode::stamp_mismatch,
            "leverage surface dtau " + std::to_string(stamp_.dtau) + " differs from pricing dtau " +
                std::to_string(dtau));
    require(std::abs(stamp_.maturity - maturity) <= 1e-12 * std::max(1.0, maturity), ErrorCode::stamp_mismatch,
            "leverage surface maturity differs from the pricing maturity");
}

namespace {

struct Substep {
    double from;
    double to;
    bool implicit;
};

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

CalibrationResult calibrate(const Grid2D& grid, const DiffOps& ops, const SlvParams& params, const LvSurface& lv,
                            const CalibConfig& cfg) {
    cfg.validate();
    params.validate();
    const std::size_t n_steps = step_count(params.maturity, cfg.dtau);
    require(cfg.rannacher_steps <= n_steps, ErrorCode::config, "more Rannacher steps than time steps");

    const std::size_t m1 = grid.m1();
    const auto& x = grid.gx.nodes;
    const PsiFamily& psi = params.psi;

    LeverageStamp stamp{m1, grid.m2(), cfg.dtau, params.maturity, cfg.rannacher_steps, grid.gx.lower,
                        grid.gx.upper};
    CalibrationResult result{LeverageSurface(x, stamp), Density{}, CalibDiagnostics{}};
    LeverageSurface& surface = result.leverage;
    CalibDiagnostics& diag = result.diagnostics;
    diag.steps = n_steps;
    diag.min_numerator = std::numeric_limits<double>::infinity();
    diag.min_denominator = std::numeric_limits<double>::infinity();

    std::vector<double> expect(m1, psi.psi_sq(params.v0));
    surface.add_level(0.0, leverage_update(lv_eval(lv, x, 0.0), expect));

    const SlvOperator op = adjoint_forward_operator(grid, ops, params, surface.function());

    std::vector<double> pbar = dirac_density(grid).data;
    std::vector<double> cur(pbar.size());
    std::vector<double> pbar_first;
    std::vector<double> lv_now(m1), e_vals(m1);

    for (std::size_t n = 1; n <= n_steps; ++n) {
        const double t_prev = static_cast<double>(n - 1) * cfg.dtau;
        const double t_next = static_cast<double>(n) * cfg.dtau;
        std::vector<Substep> subs;
        if (n <= cfg.rannacher_steps) {
            const double t_mid = t_prev + 0.5 * (t_next - t_prev);
            subs = {{t_prev, t_mid, true}, {t_mid, t_next, true}};
        } else {
            subs = {{t_prev, t_next, false}};
        }

        for (const Substep& s : subs) {
            const std::size_t level = surface.add_level(s.to, surface.level(surface.level_count() - 1));
            lv_eval(lv, x, s.to, lv_now);
            std::copy(pbar.begin(), pbar.end(), cur.begin());
            std::vector<double> last_expect = expect;

            for (std::size_t q = 1; q <= cfg.q; ++q) {
                const std::vector<Expectation> ce =
                    conditional_expectations(grid, cur, psi, params.eta, cfg.epsilon);
                for (std::size_t i = 0; i < m1; ++i) {
                    diag.min_numerator = std::min(diag.min_numerator, ce[i].numerator);
                    diag.min_denominator = std::min(diag.min_denominator, ce[i].denominator);
                    if (ce[i].fallback) {
                        ++diag.fallback_count;
                        e_vals[i] = expect[i];
                    } else {
                        e_vals[i] = ce[i].value;
                    }
                }
                std::vector<double> updated = leverage_update(lv_now, e_vals);
                if (q == cfg.q) {
                    double change = 0.0;
                    for (std::size_t i = 0; i < m1; ++i)
                        change = std::max(change, std::abs(updated[i] - surface.level(level)[i]));
                    diag.last_sweep_change = std::max(diag.last_sweep_change, change);
                }
                surface.level(level) = std::move(updated);
                last_expect = e_vals;

                if (s.implicit) {
                    const ImplicitStats st =
                        implicit_euler_solve(op, pbar, s.to, s.to - s.from, std::span<double>(cur), cfg.implicit);
                    diag.max_implicit_sweeps = std::max(diag.max_implicit_sweeps, st.sweeps);
                    if (st.direct) ++diag.direct_solves;
                } else {
                    mcs_step(op, pbar, s.from, s.to, cfg.theta, std::span<double>(cur));
                }
            }

            for (std::size_t i = 0; i < m1; ++i) {
                const double sl = surface.level(level)[i];
                diag.max_fixed_point_residual = std::max(
                    diag.max_fixed_point_residual, relative_gap(sl * sl * last_expect[i], lv_now[i] * lv_now[i]));
            }
            expect = last_expect;
            pbar.swap(cur);

            const double lowest = *std::min_element(pbar.begin(), pbar.end());
            if (lowest < 0.0) ++diag.negative_density_levels;
            diag.min_density = std::min(diag.min_density, lowest);
        }

        const double mass = total_mass(pbar);
        diag.mass_history.push_back(mass);
        diag.max_mass_drift = std::max(diag.max_mass_drift, std::abs(mass - 1.0));
        if (n == 1) pbar_first = pbar;
    }

    // The tau = 0 level was built from the Dirac start, which only carries
    // information at the spot row; rebuild it from the density one step in.
    {
        const std::vector<Expectation> ce = conditional_expectations(grid, pbar_first, psi, params.eta, cfg.epsilon);
        std::vector<double> e0(m1);
        for (std::size_t i = 0; i < m1; ++i) {
            if (ce[i].fallback) ++diag.fallback_count;
            e0[i] = ce[i].fallback ? psi.psi_sq(params.v0) : ce[i].value;
        }
        surface.level(0) = leverage_update(lv_eval(lv, x, 0.0), e0);
    }

    diag.levels = surface.level_count();
    result.density.data = std::move(pbar);
    result.density.time = params.maturity;
    return result;
}

}  // namespace slv
