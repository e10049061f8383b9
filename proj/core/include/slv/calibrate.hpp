#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slv/mesh.hpp"
#include "slv/model.hpp"
#include "slv/semidiscrete.hpp"
#include "slv/timestep.hpp"

namespace slv {

struct CalibConfig {
    std::size_t q = 2;
    double epsilon = 1e-8;
    double dtau = 1.0 / 200.0;
    double theta = 1.0 / 3.0;
    std::size_t rannacher_steps = 2;
    ImplicitOptions implicit{};

    void validate() const;
};

/// Regularized estimate of E[psi^2(V) | X = x_i] from one x-row of Pbar.
struct Expectation {
    double value = 0.0;
    double numerator = 0.0;    // sum_j psi^2(v_j) Pbar_ij, unregularized
    double denominator = 0.0;  // sum_j Pbar_ij, unregularized
    // Set when the unregularized numerator or denominator is negative; the
    // caller is expected to substitute the previous level's value.
    bool fallback = false;
};

/// `row` holds Pbar_{i,0..m2-1}, read with the given stride.
Expectation conditional_expectation(const double* row, std::size_t stride, std::span<const double> v_nodes,
                                    const PsiFamily& psi, double eta, double epsilon);
Expectation conditional_expectation(std::span<const double> row, std::span<const double> v_nodes,
                                    const PsiFamily& psi, double eta, double epsilon);
std::vector<Expectation> conditional_expectations(const Grid2D& grid, std::span<const double> pbar,
                                                  const PsiFamily& psi, double eta, double epsilon);

/// sigma_SLV = sigma_LV / sqrt(E)
std::vector<double> leverage_update(std::span<const double> lv_values, std::span<const double> expectations);

/// Identifies the grid and time stepping a leverage surface belongs to.
struct LeverageStamp {
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    double dtau = 0.0;
    double maturity = 0.0;
    std::size_t rannacher_steps = 0;
    double x_min = 0.0;
    double x_max = 0.0;
};

/// sigma_SLV(x_i, tau) at the stored time levels (including the Rannacher
/// half levels). Queries at a stored level return it exactly; between
/// levels the two neighbours are interpolated linearly, outside the stored
/// range the end level is used.
class LeverageSurface {
  public:
    LeverageSurface() = default;
    LeverageSurface(std::vector<double> x_nodes, LeverageStamp stamp);

    const std::vector<double>& x_nodes() const noexcept { return x_; }
    const LeverageStamp& stamp() const noexcept { return stamp_; }
    std::size_t level_count() const noexcept { return taus_.size(); }
    const std::vector<double>& taus() const noexcept { return taus_; }
    const std::vector<double>& level(std::size_t k) const { return values_.at(k); }
    std::vector<double>& level(std::size_t k) { return values_.at(k); }

    /// Appends a level; levels must be added in increasing tau.
    std::size_t add_level(double tau, std::vector<double> values);
    /// Index of the level stored at tau, or level_count() if none.
    std::size_t find_level(double tau) const;

    void eval(double tau, std::span<double> out) const;
    /// Callable view; the surface must outlive it.
    LeverageFn function() const;

    /// Throws stamp_mismatch unless the surface was built on this grid with this dtau and maturity.
    void check_compatible(const Grid1D& gx, double dtau, double maturity) const;

  private:
    std::vector<double> x_;
    LeverageStamp stamp_;
    std::vector<double> taus_;
    std::vector<std::vector<double>> values_;
};

struct CalibDiagnostics {
    std::size_t steps = 0;
    std::size_t levels = 0;
    std::size_t fallback_count = 0;
    double max_mass_drift = 0.0;
    std::vector<double> mass_history;  // total mass after each full step
    double min_numerator = 0.0;        // over all rows, levels and sweeps
    double min_denominator = 0.0;
    double min_density = 0.0;          // most negative Pbar entry seen
    std::size_t negative_density_levels = 0;
    double last_sweep_change = 0.0;    // max |sigma_q - sigma_{q-1}| over levels, final sweep
    std::size_t max_implicit_sweeps = 0;
    std::size_t direct_solves = 0;     // implicit systems handed to the sparse LU
    double max_fixed_point_residual = 0.0;  // max |sigma^2 E - sigma_LV^2| at the stored levels
};

struct CalibrationResult {
    LeverageSurface leverage;
    Density density;  // Pbar at tau = T
    CalibDiagnostics diagnostics;
};

CalibrationResult calibrate(const Grid2D& grid, const DiffOps& ops, const SlvParams& params, const LvSurface& lv,
                            const CalibConfig& cfg);

}  // namespace slv
