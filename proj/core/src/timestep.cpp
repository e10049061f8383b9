#include "slv/timestep.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace slv {

void McsConfig::validate() const {
    require(theta > 0.0 && std::isfinite(theta), ErrorCode::config, "theta must be positive");
    require(steps >= 1, ErrorCode::config, "at least one time step is required");
    require(rannacher_steps <= steps, ErrorCode::config, "more Rannacher steps than time steps");
}

std::size_t step_count(double horizon, double dt) {
    require(horizon > 0.0 && dt > 0.0, ErrorCode::config, "horizon and time step must be positive");
    const double ratio = horizon / dt;
    const double rounded = std::round(ratio);
    require(rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * rounded, ErrorCode::config,
            "time step " + std::to_string(dt) + " does not divide the horizon " + std::to_string(horizon));
    return static_cast<std::size_t>(rounded);
}

void sparse_implicit_solve(std::size_t n, std::span<const SparseEntry> a, double h, std::span<const double> rhs,
                           std::span<double> out) {
    require(rhs.size() == n && out.size() == n, ErrorCode::invalid_argument, "sparse solve: dimension mismatch");
    using Index = Eigen::Index;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a.size() + n);
    for (std::size_t k = 0; k < n; ++k) trip.emplace_back(static_cast<Index>(k), static_cast<Index>(k), 1.0);
    for (const SparseEntry& e : a) {
        require(e.row < n && e.col < n, ErrorCode::invalid_argument, "sparse solve: entry out of range");
        trip.emplace_back(static_cast<Index>(e.row), static_cast<Index>(e.col), -h * e.value);
    }
    Eigen::SparseMatrix<double> m(static_cast<Index>(n), static_cast<Index>(n));
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    require(lu.info() == Eigen::Success, ErrorCode::singular_system, "sparse LU factorization failed");
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Index>(n));
    const Eigen::VectorXd x = lu.solve(b);
    require(lu.info() == Eigen::Success, ErrorCode::singular_system, "sparse LU solve failed");
    std::copy(x.data(), x.data() + n, out.begin());
}

}  // namespace slv
