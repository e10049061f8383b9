#include "slv/banded_lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slv/error.hpp"

namespace slv {

BandedLu::BandedLu(const BandedMatrix& a, double c, bool transpose) : n_(a.dim()) {
    const int lo = transpose ? a.upper_bw() : a.lower_bw();
    const int hi = transpose ? a.lower_bw() : a.upper_bw();
    kl_ = static_cast<std::size_t>(lo);
    ku_ = static_cast<std::size_t>(hi);
    // Row i holds columns i-kl .. i+ku+kl.
    width_ = 2 * kl_ + ku_ + 1;
    work_.assign(n_ * width_, 0.0);
    pivots_.resize(n_);

    for (std::size_t i = 0; i < n_; ++i) {
        for (int k = -BandedMatrix::max_bw; k <= BandedMatrix::max_bw; ++k) {
            const long j = static_cast<long>(i) + k;
            if (j < 0 || j >= static_cast<long>(n_)) continue;
            const double aij = transpose ? a.entry(static_cast<std::size_t>(j), i)
                                         : a.entry(i, static_cast<std::size_t>(j));
            if (aij != 0.0) w(i, static_cast<std::size_t>(j)) = -c * aij;
        }
        w(i, i) += 1.0;
    }
    factor();
}

void BandedLu::factor() {
    double scale = 0.0;
    for (double v : work_) scale = std::max(scale, std::abs(v));
    const double tiny = scale * static_cast<double>(n_) * std::numeric_limits<double>::epsilon();

    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t last = std::min(n_ - 1, k + kl_);
        std::size_t p = k;
        for (std::size_t i = k + 1; i <= last; ++i)
            if (std::abs(w(i, k)) > std::abs(w(p, k))) p = i;
        pivots_[k] = p;
        if (!(std::abs(w(p, k)) > tiny))
            throw Error(ErrorCode::singular_system,
                        "singular banded system at row " + std::to_string(k));
        const std::size_t col_end = std::min(n_ - 1, k + ku_ + kl_);
        if (p != k)
            for (std::size_t j = k; j <= col_end; ++j) std::swap(w(k, j), w(p, j));
        const double piv = w(k, k);
        for (std::size_t i = k + 1; i <= last; ++i) {
            const double l = w(i, k) / piv;
            w(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j <= col_end; ++j) w(i, j) -= l * w(k, j);
        }
    }
}

void BandedLu::solve(std::span<double> x) const {
    require(x.size() == n_, ErrorCode::invalid_argument, "banded solve: dimension mismatch");
    solve(x.data(), 1);
}

void BandedLu::solve(double* x, std::size_t stride) const {
    auto at = [&](std::size_t i) -> double& { return x[i * stride]; };
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t p = pivots_[k];
        if (p != k) std::swap(at(k), at(p));
        const std::size_t last = std::min(n_ - 1, k + kl_);
        const double xk = at(k);
        for (std::size_t i = k + 1; i <= last; ++i) at(i) -= w(i, k) * xk;
    }
    for (std::size_t k = n_; k-- > 0;) {
        const std::size_t col_end = std::min(n_ - 1, k + ku_ + kl_);
        double s = at(k);
        for (std::size_t j = k + 1; j <= col_end; ++j) s -= w(k, j) * at(j);
        at(k) = s / w(k, k);
    }
}

std::vector<double> banded_solve(const BandedMatrix& a, double c, std::span<const double> rhs) {
    std::vector<double> x(rhs.begin(), rhs.end());
    BandedLu(a, c).solve(x);
    return x;
}

}  // namespace slv
