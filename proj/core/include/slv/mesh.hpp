#pragma once

#include <cstddef>
#include <vector>

namespace slv {

// Non-uniform one-dimensional mesh. Indices are zero based:
//   widths[i] = nodes[i] - nodes[i-1] for 1 <= i < size(), widths[0] = widths[size()] = 0
//   weights[i] = (widths[i] + widths[i+1]) / 2   (trapezoidal rule)
struct Grid1D {
    std::vector<double> nodes;
    std::vector<double> widths;
    std::vector<double> weights;
    std::size_t spot_index = 0;
    double lower = 0.0;
    double upper = 0.0;
    double uniform_lo = 0.0;
    double uniform_hi = 0.0;
    // Nominal step of the underlying uniform parameter mesh.
    double parameter_step = 0.0;

    std::size_t size() const noexcept { return nodes.size(); }
    double spot() const { return nodes[spot_index]; }
    double width(std::size_t i) const { return widths[i]; }
};

struct Grid2D {
    Grid1D gx;
    Grid1D gv;
    bool alpha_positive = true;

    std::size_t m1() const noexcept { return gx.size(); }
    std::size_t m2() const noexcept { return gv.size(); }
    std::size_t size() const noexcept { return m1() * m2(); }
    // Column-major flattening, x fastest.
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i + m1() * j; }
};

/// Sinh-stretched mesh on [lower, upper] that is uniform (up to the snap of
/// the spot onto a node) on [spot - halfwidth, spot + halfwidth] and grows
/// smoothly outside. `stretch` is the sinh scale; smaller values push more
/// nodes into the uniform zone. Zero means halfwidth / 5.
Grid1D build_sinh_grid(std::size_t m, double spot, double lower, double upper,
                       double uniform_halfwidth, double stretch = 0.0);

Grid1D build_grid_x(std::size_t m1, double x0, double x_min, double x_max,
                    double uniform_halfwidth, double stretch = 0.0);

/// alpha > 0 forces v_min == 0 (non-negative variance process).
Grid1D build_grid_v(std::size_t m2, double v0, double v_min, double v_max,
                    double uniform_halfwidth, double alpha, double stretch = 0.0);

struct GridSpec {
    std::size_t m1 = 100;
    std::size_t m2 = 50;
    double x0 = 0.0;
    double x_min = -1.0;
    double x_max = 1.0;
    double x_uniform_halfwidth = 0.5;
    double x_stretch = 0.0;  // 0: halfwidth / 5
    double v0 = 0.015;
    double v_min = 0.0;
    double v_max = 5.0;
    double v_uniform_halfwidth = 0.0075;
    double v_stretch = 0.0;
    double alpha = 0.5;
};

Grid2D build_grid(const GridSpec& spec);

}  // namespace slv
