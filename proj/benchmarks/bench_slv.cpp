#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "slv/calibrate.hpp"
#include "slv/mesh.hpp"
#include "slv/model.hpp"
#include "slv/pricing.hpp"
#include "slv/semidiscrete.hpp"
#include "slv/timestep.hpp"

namespace {

struct Setup {
    slv::SlvParams params;
    slv::Grid2D grid;
    slv::DiffOps ops;

    explicit Setup(std::size_t m1, int case_id = 1)
        : params(slv::case_params(case_id)),
          grid(slv::build_grid(slv::default_grid_spec(params, m1, m1 / 2))),
          ops(slv::assemble_ops(grid, params.psi.alpha())) {}
};

void unit_leverage(double, std::span<double> out) {
    for (double& l : out) l = 1.0;
}

void BM_ApplyFull(benchmark::State& state) {
    const Setup s(static_cast<std::size_t>(state.range(0)));
    const auto op = slv::adjoint_forward_operator(s.grid, s.ops, s.params, unit_leverage);
    std::vector<double> in = slv::dirac_density(s.grid).data, out(in.size());
    for (auto _ : state) {
        op.apply_full(0.1, in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(in.size()));
}
BENCHMARK(BM_ApplyFull)->Arg(50)->Arg(100)->Arg(200);

void BM_McsStep(benchmark::State& state) {
    const Setup s(static_cast<std::size_t>(state.range(0)));
    const auto op = slv::adjoint_forward_operator(s.grid, s.ops, s.params, unit_leverage);
    const std::vector<double> w = slv::dirac_density(s.grid).data;
    std::vector<double> out(w.size());
    for (auto _ : state) {
        slv::mcs_step(op, w, 0.1, 0.105, 1.0 / 3.0, std::span<double>(out));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(w.size()));
}
BENCHMARK(BM_McsStep)->Arg(50)->Arg(100)->Arg(200);

void BM_Calibrate(benchmark::State& state) {
    const Setup s(static_cast<std::size_t>(state.range(0)));
    const auto lv = slv::smile_lv_surface(s.params.maturity);
    slv::CalibConfig cfg;
    for (auto _ : state) {
        auto res = slv::calibrate(s.grid, s.ops, s.params, lv, cfg);
        benchmark::DoNotOptimize(res.density.data.data());
    }
}
BENCHMARK(BM_Calibrate)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PriceFourRoutes(benchmark::State& state) {
    const Setup s(100);
    const auto lv = slv::smile_lv_surface(s.params.maturity);
    const auto cal = slv::calibrate(s.grid, s.ops, s.params, lv, slv::CalibConfig{});
    const auto strikes = slv::default_strike_ladder();
    for (auto _ : state) {
        auto rep = slv::price_four_routes(s.grid, s.ops, s.params, lv, cal.leverage, strikes, slv::PricingConfig{});
        benchmark::DoNotOptimize(rep.rows.data());
    }
}
BENCHMARK(BM_PriceFourRoutes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
