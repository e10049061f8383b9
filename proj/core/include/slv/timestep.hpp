#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slv/error.hpp"
#include "slv/semidiscrete.hpp"

namespace slv {

// F = F0 + F1 + F2 applied per part, with (I - c F1) and (I - c F2) solvable.
template <class Op>
concept SplitOperator = requires(const Op& op, Part p, double t, double c, std::span<const double> in,
                                 std::span<double> out) {
    { op.size() } -> std::convertible_to<std::size_t>;
    op.apply(p, t, in, out);
    op.solve(p, t, c, in, out);
};

// A single operator A(t) with (I - c A) solvable directly.
template <class Op>
concept LineOperator = requires(const Op& op, double t, double c, std::span<const double> in,
                                std::span<double> out) {
    { op.size() } -> std::convertible_to<std::size_t>;
    op.apply(t, in, out);
    op.solve(t, c, in, out);
};

struct McsConfig {
    double theta = 1.0 / 3.0;
    std::size_t steps = 200;
    std::size_t rannacher_steps = 2;

    void validate() const;
};

/// Number of steps of size dt covering [0, horizon]; dt must divide the horizon.
std::size_t step_count(double horizon, double dt);

// How the two-dimensional implicit Euler systems are solved. The fixed point
// keeps everything banded; the direct route factors the assembled sparse
// matrix and is used when the fixed point stalls (very stiff grids).
enum class ImplicitMethod { picard, direct, picard_then_direct };

struct ImplicitOptions {
    double tolerance = 1e-12;
    std::size_t max_sweeps = 50;
    ImplicitMethod method = ImplicitMethod::picard_then_direct;
};

struct ImplicitStats {
    std::size_t sweeps = 0;
    double last_change = 0.0;
    bool direct = false;
};

/// out = (I - h A)^{-1} rhs for an assembled n x n matrix A (sparse LU).
void sparse_implicit_solve(std::size_t n, std::span<const SparseEntry> a, double h, std::span<const double> rhs,
                           std::span<double> out);

namespace detail {

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace detail

/// One MCS step from t_prev to t_next. theta = 1/2 gives Craig-Sneyd.
template <SplitOperator Op>
void mcs_step(const Op& op, std::span<const double> w, double t_prev, double t_next, double theta,
              std::span<double> out) {
    const std::size_t n = op.size();
    require(w.size() == n && out.size() == n, ErrorCode::invalid_argument, "mcs_step: dimension mismatch");
    require(theta > 0.0, ErrorCode::invalid_argument, "mcs_step: theta must be positive");
    const double dt = t_next - t_prev;
    const double c = theta * dt;

    std::vector<double> f0(n), f1(n), f2(n), y0(n), y(n), g(n);
    op.apply(Part::mixed, t_prev, w, f0);
    op.apply(Part::x, t_prev, w, f1);
    op.apply(Part::v, t_prev, w, f2);
    for (std::size_t k = 0; k < n; ++k) y0[k] = w[k] + dt * ((f0[k] + f1[k]) + f2[k]);

    // Y1, Y2
    for (std::size_t k = 0; k < n; ++k) y[k] = y0[k] - c * f1[k];
    op.solve(Part::x, t_next, c, y, y);
    for (std::size_t k = 0; k < n; ++k) y[k] -= c * f2[k];
    op.solve(Part::v, t_next, c, y, y);

    // Yhat0, then Ytilde0
    op.apply(Part::mixed, t_next, y, g);
    for (std::size_t k = 0; k < n; ++k) y0[k] += c * (g[k] - f0[k]);
    const double lag = (0.5 - theta) * dt;
    if (lag != 0.0) {
        std::vector<double> h1(n), h2(n);
        op.apply(Part::x, t_next, y, h1);
        op.apply(Part::v, t_next, y, h2);
        for (std::size_t k = 0; k < n; ++k)
            y0[k] += lag * (((g[k] + h1[k]) + h2[k]) - ((f0[k] + f1[k]) + f2[k]));
    }

    for (std::size_t k = 0; k < n; ++k) out[k] = y0[k] - c * f1[k];
    op.solve(Part::x, t_next, c, out, out);
    for (std::size_t k = 0; k < n; ++k) out[k] -= c * f2[k];
    op.solve(Part::v, t_next, c, out, out);
}

template <SplitOperator Op>
std::vector<double> mcs_step(const Op& op, std::span<const double> w, double t_prev, double t_next,
                             double theta) {
    std::vector<double> out(w.size());
    mcs_step(op, w, t_prev, t_next, theta, std::span<double>(out));
    return out;
}

/// Solves (I - h F(t)) w = rhs by fixed-point sweeps over the directional
/// solves: (I - h F1)(I - h F2) w = rhs + h F0 w + h^2 F1 F2 w with the right
/// side lagged. `w` holds the initial guess on entry.
template <SplitOperator Op>
ImplicitStats implicit_euler_solve(const Op& op, std::span<const double> rhs, double t, double h,
                                   std::span<double> w, ImplicitOptions opts = {}) {
    constexpr bool assembled = requires(const Op& o, double tt) {
        { o.entries(tt) } -> std::convertible_to<std::vector<SparseEntry>>;
    };
    const std::size_t n = op.size();
    require(rhs.size() == n && w.size() == n, ErrorCode::invalid_argument, "implicit solve: dimension mismatch");
    ImplicitStats stats;
    if constexpr (assembled) {
        if (opts.method == ImplicitMethod::direct) {
            sparse_implicit_solve(n, op.entries(t), h, rhs, w);
            stats.direct = true;
            return stats;
        }
    }

    std::vector<double> a(n), b(n), next(n);
    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        op.apply(Part::mixed, t, w, a);
        op.apply(Part::v, t, w, b);
        op.apply(Part::x, t, b, next);
        for (std::size_t k = 0; k < n; ++k) next[k] = rhs[k] + h * a[k] + h * h * next[k];
        op.solve(Part::x, t, h, next, next);
        op.solve(Part::v, t, h, next, next);

        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) change = std::max(change, std::abs(next[k] - w[k]));
        std::copy(next.begin(), next.end(), w.begin());
        stats.sweeps = sweep;
        stats.last_change = change;
        if (change <= opts.tolerance * std::max(1.0, detail::max_abs(w))) return stats;
    }
    if constexpr (assembled) {
        if (opts.method == ImplicitMethod::picard_then_direct) {
            sparse_implicit_solve(n, op.entries(t), h, rhs, w);
            stats.direct = true;
            return stats;
        }
    }
    throw Error(ErrorCode::no_convergence,
                "implicit Euler fixed point did not converge in " + std::to_string(opts.max_sweeps) +
                    " sweeps (last change " + std::to_string(stats.last_change) + ")");
}

/// One implicit Euler step of size t_next - t_prev.
template <SplitOperator Op>
ImplicitStats implicit_euler_step(const Op& op, std::span<const double> w_prev, double t_prev, double t_next,
                                  std::span<double> out, ImplicitOptions opts = {}) {
    if (out.data() != w_prev.data()) std::copy(w_prev.begin(), w_prev.end(), out.begin());
    std::vector<double> rhs(w_prev.begin(), w_prev.end());
    return implicit_euler_solve(op, rhs, t_next, t_next - t_prev, out, opts);
}

/// Two implicit Euler steps of half size.
template <SplitOperator Op>
ImplicitStats implicit_euler_half_steps(const Op& op, std::span<const double> w_prev, double t_prev,
                                        double t_next, std::span<double> out, ImplicitOptions opts = {}) {
    const double t_mid = t_prev + 0.5 * (t_next - t_prev);
    std::vector<double> mid(w_prev.size());
    const ImplicitStats s1 = implicit_euler_step(op, w_prev, t_prev, t_mid, std::span<double>(mid), opts);
    ImplicitStats s2 = implicit_euler_step(op, mid, t_mid, t_next, out, opts);
    s2.sweeps = std::max(s1.sweeps, s2.sweeps);
    s2.direct = s1.direct || s2.direct;
    return s2;
}

template <LineOperator Op>
void implicit_euler_step(const Op& op, std::span<const double> w_prev, double t_prev, double t_next,
                         std::span<double> out) {
    op.solve(t_next, t_next - t_prev, w_prev, out);
}

template <LineOperator Op>
void implicit_euler_half_steps(const Op& op, std::span<const double> w_prev, double t_prev, double t_next,
                               std::span<double> out) {
    const double t_mid = t_prev + 0.5 * (t_next - t_prev);
    op.solve(t_mid, t_mid - t_prev, w_prev, out);
    op.solve(t_next, t_next - t_mid, out, out);
}

/// (I - dt/2 A(t_next)) w = (I + dt/2 A(t_prev)) w_prev
template <LineOperator Op>
void crank_nicolson_step(const Op& op, std::span<const double> w_prev, double t_prev, double t_next,
                         std::span<double> out) {
    const std::size_t n = op.size();
    require(w_prev.size() == n && out.size() == n, ErrorCode::invalid_argument,
            "crank_nicolson_step: dimension mismatch");
    const double half = 0.5 * (t_next - t_prev);
    std::vector<double> rhs(n);
    op.apply(t_prev, w_prev, rhs);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = w_prev[k] + half * rhs[k];
    op.solve(t_next, half, rhs, out);
}

/// Called after every completed step n (1-based) with the scheme time and state.
using StepObserver = std::function<void(std::size_t n, double t, std::span<const double> w)>;

/// Rannacher start-up followed by MCS on [t0, t0 + steps*dt].
template <SplitOperator Op>
std::vector<double> integrate(const Op& op, std::vector<double> w, double t0, double dt, const McsConfig& cfg,
                              const StepObserver& observer = {}, ImplicitOptions opts = {}) {
    cfg.validate();
    std::vector<double> next(w.size());
    for (std::size_t n = 1; n <= cfg.steps; ++n) {
        const double t_prev = t0 + static_cast<double>(n - 1) * dt;
        const double t_next = t0 + static_cast<double>(n) * dt;
        if (n <= cfg.rannacher_steps)
            implicit_euler_half_steps(op, w, t_prev, t_next, std::span<double>(next), opts);
        else
            mcs_step(op, w, t_prev, t_next, cfg.theta, std::span<double>(next));
        w.swap(next);
        if (observer) observer(n, t_next, w);
    }
    return w;
}

/// Rannacher start-up followed by Crank-Nicolson.
template <LineOperator Op>
std::vector<double> integrate(const Op& op, std::vector<double> w, double t0, double dt, std::size_t steps,
                              std::size_t rannacher_steps, const StepObserver& observer = {}) {
    std::vector<double> next(w.size());
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t_prev = t0 + static_cast<double>(n - 1) * dt;
        const double t_next = t0 + static_cast<double>(n) * dt;
        if (n <= rannacher_steps)
            implicit_euler_half_steps(op, w, t_prev, t_next, std::span<double>(next));
        else
            crank_nicolson_step(op, w, t_prev, t_next, std::span<double>(next));
        w.swap(next);
        if (observer) observer(n, t_next, w);
    }
    return w;
}

}  // namespace slv
