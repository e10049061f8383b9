#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slv/fdops.hpp"

namespace slv {

/// LU factorization with partial pivoting confined to the band (the scheme of
/// LAPACK's gbtrf). Row swaps widen the upper band by at most `kl`.
class BandedLu {
  public:
    BandedLu() = default;
    /// Factor (I - c*A), or (I - c*A^T) when `transpose` is set.
    BandedLu(const BandedMatrix& a, double c, bool transpose = false);

    std::size_t dim() const noexcept { return n_; }

    /// Solves in place; x holds the right-hand side on entry.
    void solve(std::span<double> x) const;
    void solve(double* x, std::size_t stride) const;

  private:
    double& w(std::size_t i, std::size_t j) { return work_[i * width_ + (j + kl_ - i)]; }
    double w(std::size_t i, std::size_t j) const { return work_[i * width_ + (j + kl_ - i)]; }
    void factor();

    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::size_t width_ = 0;
    std::vector<double> work_;
    std::vector<std::size_t> pivots_;
};

/// Convenience: x = (I - c*A)^{-1} rhs.
std::vector<double> banded_solve(const BandedMatrix& a, double c, std::span<const double> rhs);

}  // namespace slv
