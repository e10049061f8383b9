#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "slv/mesh.hpp"

namespace slv {

enum class PsiKind {
    sqrt,    // psi(v) = sqrt(v), alpha = 1/2 (Heston)
    linear,  // psi(v) = v, alpha = 1
    exp,     // psi(v) = e^v, alpha = 0 (exponential Ornstein-Uhlenbeck)
    unit,    // psi(v) = 1, alpha = 0; collapses the SLV model to pure LV when xi = 0
};

struct PsiFamily {
    PsiKind kind = PsiKind::sqrt;

    double alpha() const noexcept;
    double psi(double v) const noexcept;
    double psi_sq(double v) const noexcept;
    // v^alpha and v^(2 alpha); both equal 1 when alpha = 0.
    double v_pow_alpha(double v) const noexcept;
    double v_pow_two_alpha(double v) const noexcept;
};

PsiKind parse_psi_kind(std::string_view name);
std::string_view to_string(PsiKind kind) noexcept;

struct SlvParams {
    double kappa = 3.02;
    double eta = 0.015;
    double xi_sv = 0.41;
    double mu = 0.75;
    double rho = -0.13;
    double rd = 0.03;
    double rf = 0.01;
    double s0 = 1.0764;
    double v0 = 0.015;
    double maturity = 0.5;
    PsiFamily psi{};

    /// Effective vol-of-vol of the SLV variance process.
    double xi() const noexcept { return mu * xi_sv; }
    double feller_indicator() const noexcept { return 2.0 * kappa * eta - xi() * xi(); }
    void validate() const;
};

/// Parameter sets 1-4 of the EUR/USD experiments (Heston psi, V0 = eta).
SlvParams case_params(int case_id);

/// Default mesh for a parameter set. With s = reference_vol * sqrt(T): x in
/// [-5s, 5s], uniform zone +-s/2 and sinh scale 0.03 s; v in [0, 5] for
/// alpha > 0 ([v0 - 2, v0 + 2] otherwise), uniform zone +-eta/2 and sinh
/// scale (v_max - v_min) / 160.
GridSpec default_grid_spec(const SlvParams& params, std::size_t m1 = 100, std::size_t m2 = 50,
                           double reference_vol = 0.2);

/// sigma_LV sampled on a tensor grid; values are stored x-major:
/// values[ix * tau_samples.size() + it].
class LvSurface {
  public:
    LvSurface() = default;
    LvSurface(std::vector<double> x_samples, std::vector<double> tau_samples, std::vector<double> values);

    bool empty() const noexcept { return values_.empty(); }
    const std::vector<double>& x_samples() const noexcept { return x_; }
    const std::vector<double>& tau_samples() const noexcept { return tau_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Bilinear inside the sample hull, constant outside.
    double operator()(double x, double tau) const;

  private:
    std::vector<double> x_, tau_, values_;
};

std::vector<double> lv_eval(const LvSurface& surface, std::span<const double> x_nodes, double tau);
void lv_eval(const LvSurface& surface, std::span<const double> x_nodes, double tau, std::span<double> out);

LvSurface flat_lv_surface(double sigma, double horizon);

struct SmileShape {
    double base = 0.1;       // value at the money
    double curvature = 0.5;  // coefficient of x^2 at tau = 0
};
/// sigma(x, tau) = base + curvature * x^2 * exp(-tau), capped to [0.05, 0.5],
/// sampled every 1/40 in x on [-3, 3] and every 1/40 in tau on [0, horizon].
LvSurface smile_lv_surface(double horizon, SmileShape shape = {});

}  // namespace slv
