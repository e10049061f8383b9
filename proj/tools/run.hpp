#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slv/calibrate.hpp"
#include "slv/mesh.hpp"
#include "slv/model.hpp"
#include "slv/pricing.hpp"

namespace slvcli {

struct RunConfig {
    int case_id = 1;
    // Individual parameter overrides on top of the case.
    std::optional<double> kappa, eta, xi_sv, mu, rho, rd, rf, s0, v0, maturity;
    std::optional<std::string> psi;

    std::size_t m1 = 100;
    std::size_t m2 = 50;
    double dtau = 1.0 / 200.0;
    double theta = 1.0 / 3.0;
    std::size_t q = 2;
    double epsilon = 1e-8;
    std::size_t rannacher_steps = 2;

    double reference_vol = 0.2;
    std::optional<double> x_min, x_max, v_max;

    // "smile", "flat:<sigma>" or a CSV path.
    std::string lv_surface = "smile";
    std::string out = "out";
    std::vector<double> strikes = slv::default_strike_ladder();

    void validate() const;
};

/// key = value lines; '#' starts a comment. Unknown keys are an error.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::vector<double> parse_number_list(const std::string& text);

struct Problem {
    slv::SlvParams params;
    slv::Grid2D grid;
    slv::DiffOps ops;
    slv::LvSurface lv;
};

Problem build_problem(const RunConfig& cfg);
slv::CalibConfig calib_config(const RunConfig& cfg);
slv::PricingConfig pricing_config(const RunConfig& cfg);

std::string diagnostics_json(const RunConfig& cfg, const slv::CalibDiagnostics& d);

/// Writes leverage.csv, density.csv and diagnostics.json into cfg.out.
int run_calibrate(const RunConfig& cfg);
/// Writes report.csv (discounted) and report_undiscounted.csv into cfg.out.
int run_price(const RunConfig& cfg, const std::string& leverage_path);

}  // namespace slvcli
