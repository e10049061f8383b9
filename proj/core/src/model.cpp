#include "slv/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slv/error.hpp"

namespace slv {

double PsiFamily::alpha() const noexcept {
    switch (kind) {
        case PsiKind::sqrt: return 0.5;
        case PsiKind::linear: return 1.0;
        case PsiKind::exp:
        case PsiKind::unit: return 0.0;
    }
    return 0.0;
}

double PsiFamily::psi(double v) const noexcept {
    switch (kind) {
        case PsiKind::sqrt: return std::sqrt(std::max(v, 0.0));
        case PsiKind::linear: return v;
        case PsiKind::exp: return std::exp(v);
        case PsiKind::unit: return 1.0;
    }
    return 1.0;
}

double PsiFamily::psi_sq(double v) const noexcept {
    switch (kind) {
        case PsiKind::sqrt: return std::max(v, 0.0);
        case PsiKind::linear: return v * v;
        case PsiKind::exp: return std::exp(2.0 * v);
        case PsiKind::unit: return 1.0;
    }
    return 1.0;
}

double PsiFamily::v_pow_alpha(double v) const noexcept {
    switch (kind) {
        case PsiKind::sqrt: return std::sqrt(std::max(v, 0.0));
        case PsiKind::linear: return v;
        default: return 1.0;
    }
}

double PsiFamily::v_pow_two_alpha(double v) const noexcept {
    switch (kind) {
        case PsiKind::sqrt: return std::max(v, 0.0);
        case PsiKind::linear: return v * v;
        default: return 1.0;
    }
}

PsiKind parse_psi_kind(std::string_view name) {
    if (name == "sqrt" || name == "heston") return PsiKind::sqrt;
    if (name == "linear") return PsiKind::linear;
    if (name == "exp") return PsiKind::exp;
    if (name == "unit") return PsiKind::unit;
    throw Error(ErrorCode::config, "unknown psi family '" + std::string(name) + "'");
}

std::string_view to_string(PsiKind kind) noexcept {
    switch (kind) {
        case PsiKind::sqrt: return "sqrt";
        case PsiKind::linear: return "linear";
        case PsiKind::exp: return "exp";
        case PsiKind::unit: return "unit";
    }
    return "sqrt";
}

void SlvParams::validate() const {
    require(kappa > 0.0 && eta > 0.0 && xi_sv > 0.0, ErrorCode::invalid_argument,
            "kappa, eta and xi_sv must be positive");
    require(mu >= 0.0 && mu <= 1.0, ErrorCode::invalid_argument, "mixing parameter must lie in [0, 1]");
    require(rho >= -1.0 && rho <= 1.0, ErrorCode::invalid_argument, "correlation must lie in [-1, 1]");
    require(s0 > 0.0, ErrorCode::invalid_argument, "spot must be positive");
    require(maturity > 0.0, ErrorCode::invalid_argument, "maturity must be positive");
    require(psi.alpha() == 0.0 || v0 > 0.0, ErrorCode::invalid_argument,
            "V0 must be positive for a non-negative variance process");
}

SlvParams case_params(int case_id) {
    SlvParams p;
    switch (case_id) {
        case 1: p.kappa = 3.02; p.eta = 0.015; p.xi_sv = 0.41; p.rho = -0.13; p.mu = 0.75; p.maturity = 0.5; break;
        case 2: p.kappa = 1.00; p.eta = 0.09;  p.xi_sv = 1.00; p.rho = -0.3;  p.mu = 1.0;  p.maturity = 0.5; break;
        case 3: p.kappa = 0.75; p.eta = 0.015; p.xi_sv = 0.20; p.rho = -0.14; p.mu = 0.75; p.maturity = 2.0; break;
        case 4: p.kappa = 1.00; p.eta = 0.09;  p.xi_sv = 1.00; p.rho = -0.3;  p.mu = 1.0;  p.maturity = 2.0; break;
        default: throw Error(ErrorCode::invalid_argument, "unknown case id " + std::to_string(case_id));
    }
    p.rd = 0.03;
    p.rf = 0.01;
    p.s0 = 1.0764;
    p.v0 = p.eta;
    p.psi = PsiFamily{PsiKind::sqrt};
    return p;
}

LvSurface::LvSurface(std::vector<double> x_samples, std::vector<double> tau_samples, std::vector<double> values)
    : x_(std::move(x_samples)), tau_(std::move(tau_samples)), values_(std::move(values)) {
    require(!x_.empty() && !tau_.empty(), ErrorCode::invalid_argument, "empty local volatility surface");
    require(values_.size() == x_.size() * tau_.size(), ErrorCode::invalid_argument,
            "local volatility values do not match the sample grid");
    require(std::is_sorted(x_.begin(), x_.end()) && std::adjacent_find(x_.begin(), x_.end()) == x_.end(),
            ErrorCode::invalid_argument, "x samples must be strictly increasing");
    require(std::is_sorted(tau_.begin(), tau_.end()) && std::adjacent_find(tau_.begin(), tau_.end()) == tau_.end(),
            ErrorCode::invalid_argument, "tau samples must be strictly increasing");
    for (double v : values_)
        require(v > 0.0 && std::isfinite(v), ErrorCode::invalid_argument,
                "local volatility values must be strictly positive");
}

namespace {

// Bracketing index and weight with constant extrapolation.
std::pair<std::size_t, double> locate(const std::vector<double>& s, double q) {
    if (s.size() == 1 || q <= s.front()) return {0, 0.0};
    if (q >= s.back()) return {s.size() - 2, 1.0};
    const auto it = std::upper_bound(s.begin(), s.end(), q);
    const auto k = static_cast<std::size_t>(it - s.begin()) - 1;
    return {k, (q - s[k]) / (s[k + 1] - s[k])};
}

}  // namespace

double LvSurface::operator()(double x, double tau) const {
    require(!empty(), ErrorCode::invalid_argument, "empty local volatility surface");
    const std::size_t nt = tau_.size();
    auto v = [&](std::size_t ix, std::size_t it) { return values_[ix * nt + it]; };
    const auto [ix, wx] = locate(x_, x);
    const auto [it, wt] = locate(tau_, tau);
    const std::size_t ix1 = x_.size() == 1 ? ix : ix + 1;
    const std::size_t it1 = nt == 1 ? it : it + 1;
    const double lo = (1.0 - wt) * v(ix, it) + wt * v(ix, it1);
    const double hi = (1.0 - wt) * v(ix1, it) + wt * v(ix1, it1);
    return (1.0 - wx) * lo + wx * hi;
}

void lv_eval(const LvSurface& surface, std::span<const double> x_nodes, double tau, std::span<double> out) {
    for (std::size_t i = 0; i < x_nodes.size(); ++i) out[i] = surface(x_nodes[i], tau);
}

std::vector<double> lv_eval(const LvSurface& surface, std::span<const double> x_nodes, double tau) {
    std::vector<double> out(x_nodes.size());
    lv_eval(surface, x_nodes, tau, out);
    return out;
}

GridSpec default_grid_spec(const SlvParams& params, std::size_t m1, std::size_t m2, double reference_vol) {
    require(reference_vol > 0.0, ErrorCode::config, "reference vol must be positive");
    GridSpec g;
    g.m1 = m1;
    g.m2 = m2;
    const double sd = reference_vol * std::sqrt(params.maturity);
    g.x0 = 0.0;
    g.x_min = -5.0 * sd;
    g.x_max = 5.0 * sd;
    g.x_uniform_halfwidth = 0.5 * sd;
    g.x_stretch = 0.03 * sd;
    g.v0 = params.v0;
    g.alpha = params.psi.alpha();
    if (g.alpha > 0.0) {
        g.v_min = 0.0;
        g.v_max = 5.0;
    } else {
        g.v_min = params.v0 - 2.0;
        g.v_max = params.v0 + 2.0;
    }
    g.v_uniform_halfwidth = 0.5 * params.eta;
    g.v_stretch = (g.v_max - g.v_min) / 160.0;
    return g;
}

LvSurface flat_lv_surface(double sigma, double horizon) {
    require(sigma > 0.0, ErrorCode::invalid_argument, "flat volatility must be positive");
    require(horizon > 0.0, ErrorCode::invalid_argument, "surface horizon must be positive");
    return LvSurface({-10.0, 10.0}, {0.0, horizon}, std::vector<double>(4, sigma));
}

LvSurface smile_lv_surface(double horizon, SmileShape shape) {
    require(horizon > 0.0, ErrorCode::invalid_argument, "surface horizon must be positive");
    std::vector<double> xs;
    for (int i = -120; i <= 120; ++i) xs.push_back(i / 40.0);
    std::vector<double> ts;
    const auto nt = static_cast<int>(std::ceil(horizon * 40.0 - 1e-9));
    for (int k = 0; k <= nt; ++k) ts.push_back(std::min(horizon, k / 40.0));
    if (ts.size() == 1) ts.push_back(horizon);
    std::vector<double> vals;
    vals.reserve(xs.size() * ts.size());
    for (double x : xs)
        for (double t : ts)
            vals.push_back(std::clamp(shape.base + shape.curvature * x * x * std::exp(-t), 0.05, 0.5));
    return LvSurface(std::move(xs), std::move(ts), std::move(vals));
}

}  // namespace slv
