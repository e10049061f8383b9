#include "slv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slv/error.hpp"

namespace slv {

namespace {

// Piecewise map from the parameter line onto [lower, upper]: linear on the
// uniform zone [b_lo, b_hi], sinh outside. It is C2 at the joins.
struct SinhMap {
    double b_lo, b_hi, c, xi_hi_zone;

    double operator()(double xi) const {
        if (xi < 0.0) return b_lo + c * std::sinh(xi);
        if (xi <= xi_hi_zone) return b_lo + c * xi;
        return b_hi + c * std::sinh(xi - xi_hi_zone);
    }
};

void finish(Grid1D& g) {
    const std::size_t m = g.nodes.size();
    g.widths.assign(m + 1, 0.0);
    for (std::size_t i = 1; i < m; ++i) g.widths[i] = g.nodes[i] - g.nodes[i - 1];
    g.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) g.weights[i] = 0.5 * (g.widths[i] + g.widths[i + 1]);
}

}  // namespace

Grid1D build_sinh_grid(std::size_t m, double spot, double lower, double upper,
                       double uniform_halfwidth, double stretch) {
    require(lower < spot && spot < upper, ErrorCode::grid,
            "grid bounds must satisfy lower < spot < upper");
    require(m >= 8, ErrorCode::grid, "grid needs at least 8 nodes, got " + std::to_string(m));
    require(uniform_halfwidth > 0.0, ErrorCode::grid, "uniform half-width must be positive");
    const double c = stretch > 0.0 ? stretch : uniform_halfwidth / 5.0;

    const double b_lo = std::max(spot - uniform_halfwidth, lower);
    const double b_hi = std::min(spot + uniform_halfwidth, upper);
    const SinhMap map{b_lo, b_hi, c, (b_hi - b_lo) / c};

    const double xi_min = b_lo > lower ? -std::asinh((b_lo - lower) / c) : 0.0;
    const double xi_max = map.xi_hi_zone + (upper > b_hi ? std::asinh((upper - b_hi) / c) : 0.0);
    const double xi_spot = (spot - b_lo) / c;
    const double dxi = (xi_max - xi_min) / static_cast<double>(m - 1);

    // Spot index on the nominal lattice; left and right parts are then
    // stretched separately so the spot lands on a node.
    // Keep at least two nodes below and three above the spot, which matters
    // when the spot sits close to a boundary on a coarse mesh.
    const auto k_raw = std::lround((xi_spot - xi_min) / dxi);
    const auto k = static_cast<std::size_t>(std::clamp<long>(k_raw, 2, static_cast<long>(m) - 3));

    Grid1D g;
    g.nodes.resize(m);
    const double step_lo = (xi_spot - xi_min) / static_cast<double>(k);
    const double step_hi = (xi_max - xi_spot) / static_cast<double>(m - 1 - k);
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = i <= k ? xi_min + step_lo * static_cast<double>(i)
                                 : xi_spot + step_hi * static_cast<double>(i - k);
        g.nodes[i] = map(xi);
    }
    g.nodes.front() = lower;
    g.nodes.back() = upper;
    g.nodes[k] = spot;
    for (std::size_t i = 1; i < m; ++i)
        require(g.nodes[i] > g.nodes[i - 1], ErrorCode::grid, "mesh nodes are not strictly increasing");

    g.spot_index = k;
    g.lower = lower;
    g.upper = upper;
    g.uniform_lo = b_lo;
    g.uniform_hi = b_hi;
    g.parameter_step = dxi;
    finish(g);
    return g;
}

Grid1D build_grid_x(std::size_t m1, double x0, double x_min, double x_max,
                    double uniform_halfwidth, double stretch) {
    require(x_min < x0 && x0 < x_max, ErrorCode::grid, "x bounds must satisfy x_min < x0 < x_max");
    return build_sinh_grid(m1, x0, x_min, x_max, uniform_halfwidth, stretch);
}

Grid1D build_grid_v(std::size_t m2, double v0, double v_min, double v_max,
                    double uniform_halfwidth, double alpha, double stretch) {
    require(alpha >= 0.0, ErrorCode::grid, "alpha must be non-negative");
    require(!(alpha > 0.0) || v_min == 0.0, ErrorCode::grid,
            "alpha > 0 requires v_min == 0");
    require(v_min < v0 && v0 < v_max, ErrorCode::grid, "v bounds must satisfy v_min < v0 < v_max");
    return build_sinh_grid(m2, v0, v_min, v_max, uniform_halfwidth, stretch);
}

Grid2D build_grid(const GridSpec& spec) {
    Grid2D g;
    g.gx = build_grid_x(spec.m1, spec.x0, spec.x_min, spec.x_max, spec.x_uniform_halfwidth, spec.x_stretch);
    g.gv = build_grid_v(spec.m2, spec.v0, spec.v_min, spec.v_max, spec.v_uniform_halfwidth, spec.alpha,
                        spec.v_stretch);
    g.alpha_positive = spec.alpha > 0.0;
    return g;
}

}  // namespace slv
