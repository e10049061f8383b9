#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "slv/mesh.hpp"

namespace slv {

struct StencilTriple {
    std::array<int, 3> offsets{};
    std::array<double, 3> coeffs{};

    double sum() const noexcept { return coeffs[0] + coeffs[1] + coeffs[2]; }
};

// Second-order stencils on a non-uniform mesh, in terms of the widths to the
// left and right of the node (central) or of the next two widths (forward).
StencilTriple central_first(double dxl, double dxr);
StencilTriple forward_first(double dx1, double dx2);
StencilTriple central_second(double dxl, double dxr);

/// Square matrix with at most two sub- and two super-diagonals.
/// Row i stores the entries at columns i-2 .. i+2.
class BandedMatrix {
  public:
    static constexpr int max_bw = 2;

    BandedMatrix() = default;
    explicit BandedMatrix(std::size_t dim) : rows_(dim, Row{}) {}

    std::size_t dim() const noexcept { return rows_.size(); }
    int lower_bw() const noexcept;
    int upper_bw() const noexcept;

    // offset in [-2, 2]
    double& at(std::size_t row, int offset) { return rows_[row][static_cast<std::size_t>(offset + max_bw)]; }
    double at(std::size_t row, int offset) const { return rows_[row][static_cast<std::size_t>(offset + max_bw)]; }
    // Dense-style lookup; zero outside the band.
    double entry(std::size_t row, std::size_t col) const;

    void set_row(std::size_t row, const StencilTriple& s);
    double row_sum(std::size_t row) const;

    void apply(std::span<const double> x, std::span<double> y) const;
    void apply_transposed(std::span<const double> x, std::span<double> y) const;
    // Strided variants act on x[offset + k*stride].
    void apply(const double* x, std::size_t stride, double* y, std::size_t ystride) const;
    void apply_transposed(const double* x, std::size_t stride, double* y, std::size_t ystride) const;

    BandedMatrix transposed() const;

  private:
    using Row = std::array<double, 2 * max_bw + 1>;
    std::vector<Row> rows_;
};

struct DiffOps {
    BandedMatrix dx, dxx, dv, dvv;
};

/// D_x and D_xx on the x mesh; boundary rows use the exponential closure
/// u = C1 exp(x) + C2, so both matrices annihilate constants.
std::pair<BandedMatrix, BandedMatrix> assemble_x_ops(const Grid1D& gx);

/// D_v and D_vv. For alpha > 0: forward stencil and zero second derivative
/// at v = 0, two-point backward difference and zero second derivative at the
/// top. For alpha = 0: linear condition at the bottom and exponential
/// closure at the top.
std::pair<BandedMatrix, BandedMatrix> assemble_v_ops(const Grid1D& gv, double alpha);

DiffOps assemble_ops(const Grid2D& grid, double alpha);

}  // namespace slv
