#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "slv/banded_lu.hpp"
#include "slv/fdops.hpp"
#include "slv/mesh.hpp"
#include "slv/model.hpp"

namespace slv {

// Backward systems evolve the value in time to maturity t; forward systems
// evolve the scaled density Pbar = M P in calendar time tau = T - t.
enum class Direction { backward, forward };

// Split of the operator: mixed derivative term, x-direction, v-direction.
enum class Part { mixed, x, v };

/// Fills `out` (size m1) with sigma_SLV(x_i, tau).
using LeverageFn = std::function<void(double tau, std::span<double> out)>;

struct ValueGrid {
    std::vector<double> data;  // m1 x m2, column major
    double time = 0.0;
};

struct Density {
    std::vector<double> data;  // m1 x m2 (or m1 for the LV density), column major
    double time = 0.0;
};

/// One coefficient of an assembled operator matrix.
struct SparseEntry {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Semidiscrete SLV operator in split form, applied matrix-free on the
/// m1 x m2 array. The forward direction is the exact transpose of the
/// backward one (same band coefficients, transposed application), which is
/// the adjoint discretization acting on Pbar.
///
/// Methods take the scheme time: t for backward, tau for forward.
class SlvOperator {
  public:
    SlvOperator(const Grid2D& grid, const DiffOps& ops, const SlvParams& params, LeverageFn leverage,
                Direction direction);

    std::size_t size() const noexcept { return m1_ * m2_; }
    std::size_t m1() const noexcept { return m1_; }
    std::size_t m2() const noexcept { return m2_; }
    Direction direction() const noexcept { return direction_; }
    /// Calendar time at which the leverage is evaluated for scheme time t.
    double leverage_time(double t) const noexcept;

    void apply(Part part, double t, std::span<const double> in, std::span<double> out) const;
    void apply_full(double t, std::span<const double> in, std::span<double> out) const;
    /// out = (I - c F_part(t))^{-1} rhs for part x or v. `out` may alias `rhs`.
    void solve(Part part, double t, double c, std::span<const double> rhs, std::span<double> out) const;

    /// Full operator matrix at scheme time t in the scheme's own orientation
    /// (the transpose of the backward matrix for the forward direction).
    /// Duplicate (row, col) pairs are to be summed.
    std::vector<SparseEntry> entries(double t) const;

    /// x-direction band matrix acting on column j at scheme time t (backward orientation).
    BandedMatrix x_matrix(std::size_t j, std::span<const double> leverage) const;
    const BandedMatrix& v_matrix() const noexcept { return v_mat_; }

  private:
    void leverage_at(double t, std::vector<double>& lev) const;
    void apply_mixed(double t, std::span<const double> in, std::span<double> out) const;
    void apply_x(double t, std::span<const double> in, std::span<double> out) const;
    void apply_v(std::span<const double> in, std::span<double> out) const;
    const BandedLu& v_factor(double c) const;

    std::size_t m1_, m2_;
    double maturity_;
    double drift_;
    double rho_xi_;
    Direction direction_;
    LeverageFn leverage_;
    BandedMatrix dx_;
    BandedMatrix diffusion_x_;  // D_xx - D_x
    BandedMatrix v_mat_;        // 1/2 xi^2 Lambda^{2 alpha} D_vv + kappa (eta - Lambda) D_v
    BandedMatrix mixed_v_;      // psi(Lambda) Lambda^alpha D_v
    std::vector<double> half_psi_sq_;

    // Not synchronized; an operator must not be solved from two threads at once.
    mutable std::vector<std::pair<double, BandedLu>> v_cache_;
};

/// One-dimensional LV operator 1/2 L_LV^2 (D_xx - D_x) + (rd - rf) D_x and its adjoint.
class LvOperator {
  public:
    LvOperator(const Grid1D& gx, const BandedMatrix& dx, const BandedMatrix& dxx, const LvSurface& surface,
               double rd, double rf, double maturity, Direction direction);

    std::size_t size() const noexcept { return dx_.dim(); }
    Direction direction() const noexcept { return direction_; }
    double surface_time(double t) const noexcept;

    /// Backward-orientation matrix at scheme time t.
    BandedMatrix matrix(double t) const;
    void apply(double t, std::span<const double> in, std::span<double> out) const;
    void solve(double t, double c, std::span<const double> rhs, std::span<double> out) const;

  private:
    std::vector<double> x_;
    BandedMatrix dx_;
    BandedMatrix diffusion_x_;
    LvSurface surface_;
    double drift_;
    double maturity_;
    Direction direction_;
};

SlvOperator backward_slv_operator(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                  LeverageFn leverage);
/// Adjoint forward operator built from the same bands as `backward_slv_operator`.
SlvOperator adjoint_forward_operator(const Grid2D& grid, const DiffOps& ops, const SlvParams& params,
                                     LeverageFn leverage);
LvOperator backward_lv_operator(const Grid1D& gx, const DiffOps& ops, const LvSurface& lv,
                                const SlvParams& params);
LvOperator forward_lv_operator(const Grid1D& gx, const DiffOps& ops, const LvSurface& lv,
                               const SlvParams& params);

/// One-hot Pbar at (i0, j0).
Density dirac_density(const Grid2D& grid);
Density dirac_density(const Grid1D& gx);
/// Value of the unscaled density P at the spot cell, 1 / (w_x,i0 * w_v,j0).
double dirac_peak(const Grid2D& grid);

/// sum_k pbar_k * u_k
double duality_value(std::span<const double> pbar, std::span<const double> u);
double duality_value(const Density& pbar, const ValueGrid& u);

/// Accurately summed total mass of Pbar.
double total_mass(std::span<const double> pbar);

}  // namespace slv
