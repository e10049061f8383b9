#include "slv/semidiscrete.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slv/error.hpp"

namespace slv {

namespace {

// a - b on the same band layout.
BandedMatrix difference(const BandedMatrix& a, const BandedMatrix& b) {
    BandedMatrix d(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (int k = -BandedMatrix::max_bw; k <= BandedMatrix::max_bw; ++k) d.at(i, k) = a.at(i, k) - b.at(i, k);
    return d;
}

// Rows scaled by s_i plus drift * d.
BandedMatrix combine_rows(const BandedMatrix& a, std::span<const double> row_scale, const BandedMatrix& d,
                          double drift) {
    BandedMatrix r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (int k = -BandedMatrix::max_bw; k <= BandedMatrix::max_bw; ++k)
            r.at(i, k) = row_scale[i] * a.at(i, k) + drift * d.at(i, k);
    return r;
}

void apply_oriented(const BandedMatrix& a, Direction dir, const double* x, std::size_t sx, double* y,
                    std::size_t sy) {
    if (dir == Direction::backward)
        a.apply(x, sx, y, sy);
    else
        a.apply_transposed(x, sx, y, sy);
}

// Neumaier summation.
struct Accumulator {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

SlvOperator::SlvOperator(const Grid2D& grid, const DiffOps& ops, const SlvParams& params, LeverageFn leverage,
                         Direction direction)
    : m1_(grid.m1()),
      m2_(grid.m2()),
      maturity_(params.maturity),
      drift_(params.rd - params.rf),
      rho_xi_(params.rho * params.xi()),
      direction_(direction),
      leverage_(std::move(leverage)),
      dx_(ops.dx),
      diffusion_x_(difference(ops.dxx, ops.dx)) {
    params.validate();
    require(ops.dx.dim() == m1_ && ops.dv.dim() == m2_, ErrorCode::invalid_argument,
            "difference operators do not match the grid");
    require(static_cast<bool>(leverage_), ErrorCode::invalid_argument, "leverage function is not set");

    const auto& v = grid.gv.nodes;
    const PsiFamily& psi = params.psi;
    const double xi = params.xi();
    half_psi_sq_.resize(m2_);
    std::vector<double> diff_scale(m2_), drift_scale(m2_), mixed_scale(m2_);
    for (std::size_t j = 0; j < m2_; ++j) {
        half_psi_sq_[j] = 0.5 * psi.psi_sq(v[j]);
        diff_scale[j] = 0.5 * xi * xi * psi.v_pow_two_alpha(v[j]);
        drift_scale[j] = params.kappa * (params.eta - v[j]);
        mixed_scale[j] = psi.psi(v[j]) * psi.v_pow_alpha(v[j]);
    }
    v_mat_ = BandedMatrix(m2_);
    mixed_v_ = BandedMatrix(m2_);
    for (std::size_t j = 0; j < m2_; ++j)
        for (int k = -BandedMatrix::max_bw; k <= BandedMatrix::max_bw; ++k) {
            v_mat_.at(j, k) = diff_scale[j] * ops.dvv.at(j, k) + drift_scale[j] * ops.dv.at(j, k);
            mixed_v_.at(j, k) = mixed_scale[j] * ops.dv.at(j, k);
        }
}

double SlvOperator::leverage_time(double t) const noexcept {
    return direction_ == Direction::backward ? maturity_ - t : t;
}

void SlvOperator::leverage_at(double t, std::vector<double>& lev) const {
    lev.resize(m1_);
    leverage_(leverage_time(t), lev);
    for (double l : lev)
        if (!(l > 0.0) || !std::isfinite(l))
            throw Error(ErrorCode::invalid_argument, "leverage must be strictly positive");
}

BandedMatrix SlvOperator::x_matrix(std::size_t j, std::span<const double> leverage) const {
    std::vector<double> scale(m1_);
    for (std::size_t i = 0; i < m1_; ++i) scale[i] = half_psi_sq_[j] * leverage[i] * leverage[i];
    return combine_rows(diffusion_x_, scale, dx_, drift_);
}

void SlvOperator::apply(Part part, double t, std::span<const double> in, std::span<double> out) const {
    require(in.size() == size() && out.size() == size(), ErrorCode::invalid_argument,
            "operator applied to a field of the wrong size");
    switch (part) {
        case Part::mixed: apply_mixed(t, in, out); break;
        case Part::x: apply_x(t, in, out); break;
        case Part::v: apply_v(in, out); break;
    }
}

void SlvOperator::apply_full(double t, std::span<const double> in, std::span<double> out) const {
    std::vector<double> a(size()), b(size());
    apply_mixed(t, in, a);
    apply_x(t, in, b);
    apply_v(in, out);
    for (std::size_t k = 0; k < size(); ++k) out[k] = (a[k] + b[k]) + out[k];
}

void SlvOperator::apply_mixed(double t, std::span<const double> in, std::span<double> out) const {
    if (rho_xi_ == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    std::vector<double> lev;
    leverage_at(t, lev);
    std::vector<double> tmp(size());
    // v-factor along rows, then x-factor along columns.
    for (std::size_t i = 0; i < m1_; ++i) apply_oriented(mixed_v_, direction_, &in[i], m1_, &tmp[i], m1_);
    std::vector<double> col(m1_);
    for (std::size_t j = 0; j < m2_; ++j) {
        double* c = &tmp[j * m1_];
        double* o = &out[j * m1_];
        if (direction_ == Direction::backward) {
            dx_.apply(c, 1, o, 1);
            for (std::size_t i = 0; i < m1_; ++i) o[i] *= rho_xi_ * lev[i];
        } else {
            for (std::size_t i = 0; i < m1_; ++i) col[i] = rho_xi_ * lev[i] * c[i];
            dx_.apply_transposed(col.data(), 1, o, 1);
        }
    }
}

void SlvOperator::apply_x(double t, std::span<const double> in, std::span<double> out) const {
    std::vector<double> lev;
    leverage_at(t, lev);
    for (std::size_t j = 0; j < m2_; ++j) {
        const BandedMatrix a = x_matrix(j, lev);
        apply_oriented(a, direction_, &in[j * m1_], 1, &out[j * m1_], 1);
    }
}

void SlvOperator::apply_v(std::span<const double> in, std::span<double> out) const {
    for (std::size_t i = 0; i < m1_; ++i) apply_oriented(v_mat_, direction_, &in[i], m1_, &out[i], m1_);
}

std::vector<SparseEntry> SlvOperator::entries(double t) const {
    std::vector<double> lev;
    leverage_at(t, lev);
    const bool fwd = direction_ == Direction::forward;
    std::vector<SparseEntry> out;
    out.reserve(size() * 15);
    auto push = [&](std::size_t r, std::size_t c, double v) {
        if (v != 0.0) out.push_back(fwd ? SparseEntry{c, r, v} : SparseEntry{r, c, v});
    };
    constexpr int bw = BandedMatrix::max_bw;
    for (std::size_t j = 0; j < m2_; ++j) {
        const BandedMatrix a = x_matrix(j, lev);
        for (std::size_t i = 0; i < m1_; ++i) {
            const std::size_t row = i + m1_ * j;
            for (int o = -bw; o <= bw; ++o) {
                const auto ii = static_cast<std::ptrdiff_t>(i) + o;
                if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(m1_)) continue;
                push(row, static_cast<std::size_t>(ii) + m1_ * j, a.at(i, o));
            }
            for (int o = -bw; o <= bw; ++o) {
                const auto jj = static_cast<std::ptrdiff_t>(j) + o;
                if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(m2_)) continue;
                push(row, i + m1_ * static_cast<std::size_t>(jj), v_mat_.at(j, o));
            }
            if (rho_xi_ == 0.0) continue;
            for (int ox = -bw; ox <= bw; ++ox) {
                const auto ii = static_cast<std::ptrdiff_t>(i) + ox;
                if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(m1_) || dx_.at(i, ox) == 0.0) continue;
                const double cx = rho_xi_ * lev[i] * dx_.at(i, ox);
                for (int ov = -bw; ov <= bw; ++ov) {
                    const auto jj = static_cast<std::ptrdiff_t>(j) + ov;
                    if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(m2_)) continue;
                    push(row, static_cast<std::size_t>(ii) + m1_ * static_cast<std::size_t>(jj),
                         cx * mixed_v_.at(j, ov));
                }
            }
        }
    }
    return out;
}

const BandedLu& SlvOperator::v_factor(double c) const {
    for (const auto& [key, lu] : v_cache_)
        if (key == c) return lu;
    if (v_cache_.size() >= 8) v_cache_.erase(v_cache_.begin());
    v_cache_.emplace_back(c, BandedLu(v_mat_, c, direction_ == Direction::forward));
    return v_cache_.back().second;
}

void SlvOperator::solve(Part part, double t, double c, std::span<const double> rhs, std::span<double> out) const {
    require(rhs.size() == size() && out.size() == size(), ErrorCode::invalid_argument,
            "solve on a field of the wrong size");
    require(part != Part::mixed, ErrorCode::invalid_argument, "the mixed term is never solved implicitly");
    if (out.data() != rhs.data()) std::copy(rhs.begin(), rhs.end(), out.begin());
    if (part == Part::x) {
        std::vector<double> lev;
        leverage_at(t, lev);
        for (std::size_t j = 0; j < m2_; ++j) {
            const BandedLu lu(x_matrix(j, lev), c, direction_ == Direction::forward);
            lu.solve(&out[j * m1_], 1);
        }
    } else {
        const BandedLu& lu = v_factor(c);
        for (std::size_t i = 0; i < m1_; ++i) lu.solve(&out[i], m1_);
    }
}

LvOperator::LvOperator(const Grid1D& gx, const BandedMatrix& dx, const BandedMatrix& dxx,
                       const LvSurface& surface, double rd, double rf, double maturity, Direction direction)
    : x_(gx.nodes),
      dx_(dx),
      diffusion_x_(difference(dxx, dx)),
      surface_(surface),
      drift_(rd - rf),
      maturity_(maturity),
      direction_(direction) {
    require(!surface.empty(), ErrorCode::invalid_argument, "empty local volatility surface");
    require(dx.dim() == gx.size(), ErrorCode::invalid_argument, "difference operators do not match the grid");
}

double LvOperator::surface_time(double t) const noexcept {
    return direction_ == Direction::backward ? maturity_ - t : t;
}

BandedMatrix LvOperator::matrix(double t) const {
    std::vector<double> scale = lv_eval(surface_, x_, surface_time(t));
    for (double& s : scale) s = 0.5 * s * s;
    return combine_rows(diffusion_x_, scale, dx_, drift_);
}

void LvOperator::apply(double t, std::span<const double> in, std::span<double> out) const {
    require(in.size() == size() && out.size() == size(), ErrorCode::invalid_argument,
            "operator applied to a vector of the wrong size");
    apply_oriented(matrix(t), direction_, in.data(), 1, out.data(), 1);
}

void LvOperator::solve(double t, double c, std::span<const double> rhs, std::span<double> out) const {
    require(rhs.size() == size() && out.size() == size(), ErrorCode::invalid_argument,
            "solve on a vector of the wrong size");
    if (out.data() != rhs.data()) std::copy(rhs.begin(), rhs.end(), out.begin());
    BandedLu(matrix(t), c, direction_ == Direction::forward).solve(out);
}

SlvOperator backward_slv_operator(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                  LeverageFn leverage) {
    return SlvOperator(grid, ops, params, std::move(leverage), Direction::backward);
}

SlvOperator adjoint_forward_operator(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                     LeverageFn leverage) {
    return SlvOperator(grid, ops, params, std::move(leverage), Direction::forward);
}

LvOperator backward_lv_operator(const Grid1D& gx, const DiffOps& ops, const LvSurface& lv,
                                const SlvParams& params) {
    return LvOperator(gx, ops.dx, ops.dxx, lv, params.rd, params.rf, params.maturity, Direction::backward);
}

LvOperator forward_lv_operator(const Grid1D& gx, const DiffOps& ops, const LvSurface& lv,
                               const SlvParams& params) {
    return LvOperator(gx, ops.dx, ops.dxx, lv, params.rd, params.rf, params.maturity, Direction::forward);
}

Density dirac_density(const Grid2D& grid) {
    Density d;
    d.data.assign(grid.size(), 0.0);
    d.data[grid.index(grid.gx.spot_index, grid.gv.spot_index)] = 1.0;
    return d;
}

Density dirac_density(const Grid1D& gx) {
    Density d;
    d.data.assign(gx.size(), 0.0);
    d.data[gx.spot_index] = 1.0;
    return d;
}

double dirac_peak(const Grid2D& grid) {
    return 1.0 / (grid.gx.weights[grid.gx.spot_index] * grid.gv.weights[grid.gv.spot_index]);
}

double duality_value(std::span<const double> pbar, std::span<const double> u) {
    require(pbar.size() == u.size(), ErrorCode::invalid_argument, "duality value: dimension mismatch");
    Accumulator acc;
    for (std::size_t k = 0; k < pbar.size(); ++k) acc.add(pbar[k] * u[k]);
    return acc.value();
}

double duality_value(const Density& pbar, const ValueGrid& u) { return duality_value(pbar.data, u.data); }

double total_mass(std::span<const double> pbar) {
    Accumulator acc;
    for (double p : pbar) acc.add(p);
    return acc.value();
}

}  // namespace slv
