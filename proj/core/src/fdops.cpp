#include "slv/fdops.hpp"

#include <cmath>

#include "slv/error.hpp"

namespace slv {

namespace {

void check_widths(double a, double b) {
    require(a > 0.0 && b > 0.0, ErrorCode::invalid_argument, "stencil widths must be positive");
}

// Row of the exponential closure: (-c, c) on (lo, lo + 1), c chosen so that the
// row returns C1 * exp(x_row) for u = C1 exp(x) + C2.
void set_exponential_row(BandedMatrix& a, std::size_t row, std::size_t lo, double c) {
    const int off = static_cast<int>(lo) - static_cast<int>(row);
    a.at(row, off) = -c;
    a.at(row, off + 1) = c;
}

}  // namespace

StencilTriple central_first(double dxl, double dxr) {
    check_widths(dxl, dxr);
    return {{-1, 0, 1},
            {-dxr / (dxl * (dxl + dxr)), (dxr - dxl) / (dxl * dxr), dxl / (dxr * (dxl + dxr))}};
}

StencilTriple forward_first(double dx1, double dx2) {
    check_widths(dx1, dx2);
    return {{0, 1, 2},
            {(-2.0 * dx1 - dx2) / (dx1 * (dx1 + dx2)), (dx1 + dx2) / (dx1 * dx2),
             -dx1 / (dx2 * (dx1 + dx2))}};
}

StencilTriple central_second(double dxl, double dxr) {
    check_widths(dxl, dxr);
    return {{-1, 0, 1},
            {2.0 / (dxl * (dxl + dxr)), -2.0 / (dxl * dxr), 2.0 / (dxr * (dxl + dxr))}};
}

int BandedMatrix::lower_bw() const noexcept {
    int bw = 0;
    for (const auto& r : rows_)
        for (int k = 1; k <= max_bw; ++k)
            if (r[static_cast<std::size_t>(max_bw - k)] != 0.0) bw = std::max(bw, k);
    return bw;
}

int BandedMatrix::upper_bw() const noexcept {
    int bw = 0;
    for (const auto& r : rows_)
        for (int k = 1; k <= max_bw; ++k)
            if (r[static_cast<std::size_t>(max_bw + k)] != 0.0) bw = std::max(bw, k);
    return bw;
}

double BandedMatrix::entry(std::size_t row, std::size_t col) const {
    const auto off = static_cast<long>(col) - static_cast<long>(row);
    if (off < -max_bw || off > max_bw) return 0.0;
    return at(row, static_cast<int>(off));
}

void BandedMatrix::set_row(std::size_t row, const StencilTriple& s) {
    rows_[row].fill(0.0);
    for (std::size_t k = 0; k < 3; ++k) at(row, s.offsets[k]) = s.coeffs[k];
}

double BandedMatrix::row_sum(std::size_t row) const {
    double s = 0.0;
    for (double v : rows_[row]) s += v;
    return s;
}

void BandedMatrix::apply(std::span<const double> x, std::span<double> y) const {
    apply(x.data(), 1, y.data(), 1);
}

void BandedMatrix::apply_transposed(std::span<const double> x, std::span<double> y) const {
    apply_transposed(x.data(), 1, y.data(), 1);
}

void BandedMatrix::apply(const double* x, std::size_t stride, double* y, std::size_t ystride) const {
    const auto n = static_cast<long>(rows_.size());
    for (long i = 0; i < n; ++i) {
        const auto& r = rows_[static_cast<std::size_t>(i)];
        double s = 0.0;
        for (int k = -max_bw; k <= max_bw; ++k) {
            const long j = i + k;
            if (j < 0 || j >= n) continue;
            const double a = r[static_cast<std::size_t>(k + max_bw)];
            if (a != 0.0) s += a * x[static_cast<std::size_t>(j) * stride];
        }
        y[static_cast<std::size_t>(i) * ystride] = s;
    }
}

void BandedMatrix::apply_transposed(const double* x, std::size_t stride, double* y,
                                    std::size_t ystride) const {
    // (A^T x)_j = sum_i A_ij x_i, gathered by output index.
    const auto n = static_cast<long>(rows_.size());
    for (long j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = -max_bw; k <= max_bw; ++k) {
            const long i = j - k;
            if (i < 0 || i >= n) continue;
            const double a = rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k + max_bw)];
            if (a != 0.0) s += a * x[static_cast<std::size_t>(i) * stride];
        }
        y[static_cast<std::size_t>(j) * ystride] = s;
    }
}

BandedMatrix BandedMatrix::transposed() const {
    BandedMatrix t(dim());
    const auto n = static_cast<long>(dim());
    for (long i = 0; i < n; ++i)
        for (int k = -max_bw; k <= max_bw; ++k) {
            const long j = i + k;
            if (j < 0 || j >= n) continue;
            t.at(static_cast<std::size_t>(j), -k) = at(static_cast<std::size_t>(i), k);
        }
    return t;
}

std::pair<BandedMatrix, BandedMatrix> assemble_x_ops(const Grid1D& gx) {
    const std::size_t m = gx.size();
    require(m >= 3, ErrorCode::grid, "x mesh needs at least 3 nodes");
    BandedMatrix d1(m), d2(m);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        d1.set_row(i, central_first(gx.width(i), gx.width(i + 1)));
        d2.set_row(i, central_second(gx.width(i), gx.width(i + 1)));
    }
    // c = e^{x1} / (e^{x2} - e^{x1}) at the bottom, e^{xm} / (e^{xm} - e^{x(m-1)}) at the top.
    const double c_lo = 1.0 / std::expm1(gx.width(1));
    const double c_hi = -1.0 / std::expm1(-gx.width(m - 1));
    for (auto* a : {&d1, &d2}) {
        set_exponential_row(*a, 0, 0, c_lo);
        set_exponential_row(*a, m - 1, m - 2, c_hi);
    }
    return {std::move(d1), std::move(d2)};
}

std::pair<BandedMatrix, BandedMatrix> assemble_v_ops(const Grid1D& gv, double alpha) {
    const std::size_t m = gv.size();
    require(m >= 3, ErrorCode::grid, "v mesh needs at least 3 nodes");
    require(alpha >= 0.0, ErrorCode::invalid_argument, "alpha must be non-negative");
    BandedMatrix d1(m), d2(m);
    for (std::size_t j = 1; j + 1 < m; ++j) {
        d1.set_row(j, central_first(gv.width(j), gv.width(j + 1)));
        d2.set_row(j, central_second(gv.width(j), gv.width(j + 1)));
    }
    // Bottom row: one-sided first derivative, no second derivative, in both cases.
    d1.set_row(0, forward_first(gv.width(1), gv.width(2)));
    if (alpha > 0.0) {
        const double h = gv.width(m - 1);
        d1.at(m - 1, -1) = -1.0 / h;
        d1.at(m - 1, 0) = 1.0 / h;
    } else {
        const double c_hi = -1.0 / std::expm1(-gv.width(m - 1));
        set_exponential_row(d1, m - 1, m - 2, c_hi);
        set_exponential_row(d2, m - 1, m - 2, c_hi);
    }
    return {std::move(d1), std::move(d2)};
}

DiffOps assemble_ops(const Grid2D& grid, double alpha) {
    auto [dx, dxx] = assemble_x_ops(grid.gx);
    auto [dv, dvv] = assemble_v_ops(grid.gv, alpha);
    return {std::move(dx), std::move(dxx), std::move(dv), std::move(dvv)};
}

}  // namespace slv
