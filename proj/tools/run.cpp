#include "run.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "slv/csv_io.hpp"
#include "slv/error.hpp"

namespace slvcli {

using slv::ErrorCode;
using slv::require;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    require(!value.empty() && end == value.c_str() + value.size() && errno == 0 && std::isfinite(v),
            ErrorCode::config, "'" + key + "' expects a number, got '" + value + "'");
    return v;
}

std::size_t to_count(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    require(v >= 0.0 && v == std::floor(v), ErrorCode::config,
            "'" + key + "' expects a non-negative integer, got '" + value + "'");
    return static_cast<std::size_t>(v);
}

// Accepts a plain number or a ratio like 1/200.
double to_step(const std::string& key, const std::string& value) {
    const auto slash = value.find('/');
    if (slash == std::string::npos) return to_double(key, value);
    const double num = to_double(key, trim(value.substr(0, slash)));
    const double den = to_double(key, trim(value.substr(slash + 1)));
    require(den != 0.0, ErrorCode::config, "'" + key + "' has a zero denominator");
    return num / den;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double("strikes", item));
    }
    return out;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "case") cfg.case_id = static_cast<int>(to_count(key, v));
    else if (key == "kappa") cfg.kappa = to_double(key, v);
    else if (key == "eta") cfg.eta = to_double(key, v);
    else if (key == "xi_sv") cfg.xi_sv = to_double(key, v);
    else if (key == "mu") cfg.mu = to_double(key, v);
    else if (key == "rho") cfg.rho = to_double(key, v);
    else if (key == "rd") cfg.rd = to_double(key, v);
    else if (key == "rf") cfg.rf = to_double(key, v);
    else if (key == "s0") cfg.s0 = to_double(key, v);
    else if (key == "v0") cfg.v0 = to_double(key, v);
    else if (key == "maturity") cfg.maturity = to_double(key, v);
    else if (key == "psi") cfg.psi = v;
    else if (key == "m1") cfg.m1 = to_count(key, v);
    else if (key == "m2") cfg.m2 = to_count(key, v);
    else if (key == "dtau") cfg.dtau = to_step(key, v);
    else if (key == "theta") cfg.theta = to_step(key, v);
    else if (key == "q") cfg.q = to_count(key, v);
    else if (key == "epsilon") cfg.epsilon = to_double(key, v);
    else if (key == "rannacher") cfg.rannacher_steps = to_count(key, v);
    else if (key == "reference_vol") cfg.reference_vol = to_double(key, v);
    else if (key == "x_min") cfg.x_min = to_double(key, v);
    else if (key == "x_max") cfg.x_max = to_double(key, v);
    else if (key == "v_max") cfg.v_max = to_double(key, v);
    else if (key == "lv_surface") cfg.lv_surface = v;
    else if (key == "out") cfg.out = v;
    else if (key == "strikes") cfg.strikes = parse_number_list(v);
    else throw slv::Error(ErrorCode::config, "unknown configuration key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open configuration file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorCode::config,
                path + ":" + std::to_string(line_no) + ": expected key = value");
        apply_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void RunConfig::validate() const {
    require(case_id >= 1 && case_id <= 4, ErrorCode::config, "case must be 1, 2, 3 or 4");
    require(m1 >= 8 && m2 >= 8, ErrorCode::config, "m1 and m2 must be at least 8");
    require(dtau > 0.0, ErrorCode::config, "dtau must be positive");
    require(theta > 0.0, ErrorCode::config, "theta must be positive");
    require(q >= 1, ErrorCode::config, "q must be at least 1");
    require(epsilon > 0.0, ErrorCode::config, "epsilon must be positive");
    require(reference_vol > 0.0, ErrorCode::config, "reference_vol must be positive");
    require(!strikes.empty(), ErrorCode::config, "at least one strike is required");
    for (double k : strikes) require(k > 0.0, ErrorCode::config, "strikes must be positive multiples of S0");
    require(!out.empty(), ErrorCode::config, "output directory must not be empty");
}

namespace {

slv::SlvParams resolve_params(const RunConfig& cfg) {
    slv::SlvParams p = slv::case_params(cfg.case_id);
    const bool eta_set = cfg.eta.has_value();
    if (cfg.kappa) p.kappa = *cfg.kappa;
    if (cfg.eta) p.eta = *cfg.eta;
    if (cfg.xi_sv) p.xi_sv = *cfg.xi_sv;
    if (cfg.mu) p.mu = *cfg.mu;
    if (cfg.rho) p.rho = *cfg.rho;
    if (cfg.rd) p.rd = *cfg.rd;
    if (cfg.rf) p.rf = *cfg.rf;
    if (cfg.s0) p.s0 = *cfg.s0;
    if (cfg.v0)
        p.v0 = *cfg.v0;
    else if (eta_set)
        p.v0 = p.eta;
    if (cfg.maturity) p.maturity = *cfg.maturity;
    if (cfg.psi) p.psi.kind = slv::parse_psi_kind(*cfg.psi);
    try {
        p.validate();
    } catch (const slv::Error& e) {
        throw slv::Error(ErrorCode::config, e.what());
    }
    return p;
}

slv::LvSurface resolve_surface(const RunConfig& cfg, double horizon) {
    if (cfg.lv_surface == "smile") return slv::smile_lv_surface(horizon);
    if (cfg.lv_surface.rfind("flat:", 0) == 0) {
        const double sigma = to_double("lv_surface", cfg.lv_surface.substr(5));
        require(sigma > 0.0, ErrorCode::config, "flat local volatility must be positive");
        return slv::flat_lv_surface(sigma, horizon);
    }
    return slv::read_lv_surface_csv(cfg.lv_surface);
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    require(out.good(), ErrorCode::io, "cannot write " + p.string());
    return out;
}

}  // namespace

Problem build_problem(const RunConfig& cfg) {
    cfg.validate();
    Problem pr;
    pr.params = resolve_params(cfg);
    slv::GridSpec spec = slv::default_grid_spec(pr.params, cfg.m1, cfg.m2, cfg.reference_vol);
    if (cfg.x_min) spec.x_min = *cfg.x_min;
    if (cfg.x_max) spec.x_max = *cfg.x_max;
    if (cfg.v_max) spec.v_max = *cfg.v_max;
    pr.grid = slv::build_grid(spec);
    pr.ops = slv::assemble_ops(pr.grid, pr.params.psi.alpha());
    pr.lv = resolve_surface(cfg, pr.params.maturity);
    return pr;
}

slv::CalibConfig calib_config(const RunConfig& cfg) {
    slv::CalibConfig c;
    c.q = cfg.q;
    c.epsilon = cfg.epsilon;
    c.dtau = cfg.dtau;
    c.theta = cfg.theta;
    c.rannacher_steps = cfg.rannacher_steps;
    return c;
}

slv::PricingConfig pricing_config(const RunConfig& cfg) {
    slv::PricingConfig c;
    c.dtau = cfg.dtau;
    c.theta = cfg.theta;
    c.rannacher_steps = cfg.rannacher_steps;
    return c;
}

std::string diagnostics_json(const RunConfig& cfg, const slv::CalibDiagnostics& d) {
    nlohmann::ordered_json j;
    j["case"] = cfg.case_id;
    j["m1"] = cfg.m1;
    j["m2"] = cfg.m2;
    j["dtau"] = cfg.dtau;
    j["theta"] = cfg.theta;
    j["q"] = cfg.q;
    j["epsilon"] = cfg.epsilon;
    j["steps"] = d.steps;
    j["levels"] = d.levels;
    j["fallback_count"] = d.fallback_count;
    j["max_mass_drift"] = d.max_mass_drift;
    j["min_numerator"] = d.min_numerator;
    j["min_denominator"] = d.min_denominator;
    j["min_density"] = d.min_density;
    j["negative_density_levels"] = d.negative_density_levels;
    j["last_sweep_change"] = d.last_sweep_change;
    j["max_implicit_sweeps"] = d.max_implicit_sweeps;
    j["direct_solves"] = d.direct_solves;
    j["max_fixed_point_residual"] = d.max_fixed_point_residual;
    return j.dump(2) + "\n";
}

int run_calibrate(const RunConfig& cfg) {
    const Problem pr = build_problem(cfg);
    const slv::CalibrationResult res = slv::calibrate(pr.grid, pr.ops, pr.params, pr.lv, calib_config(cfg));

    const std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorCode::io, "cannot create output directory " + cfg.out + ": " + ec.message());

    {
        auto out = open_out(dir / "leverage.csv");
        slv::write_leverage_csv(out, res.leverage);
    }
    {
        auto out = open_out(dir / "density.csv");
        slv::write_density_csv(out, pr.grid, res.density.data);
    }
    {
        auto out = open_out(dir / "diagnostics.json");
        out << diagnostics_json(cfg, res.diagnostics);
    }
    return 0;
}

int run_price(const RunConfig& cfg, const std::string& leverage_path) {
    const Problem pr = build_problem(cfg);
    const slv::LeverageSurface lev = slv::read_leverage_csv(leverage_path);
    require(lev.stamp().m2 == cfg.m2, ErrorCode::stamp_mismatch,
            "leverage surface was calibrated with m2=" + std::to_string(lev.stamp().m2) + ", config has m2=" +
                std::to_string(cfg.m2));
    const slv::PriceReport report =
        slv::price_four_routes(pr.grid, pr.ops, pr.params, pr.lv, lev, cfg.strikes, pricing_config(cfg));

    const std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorCode::io, "cannot create output directory " + cfg.out + ": " + ec.message());
    const std::string label = std::to_string(cfg.case_id);
    {
        auto out = open_out(dir / "report.csv");
        slv::write_report_csv(out, report, label, true);
    }
    {
        auto out = open_out(dir / "report_undiscounted.csv");
        slv::write_report_csv(out, report, label, false);
    }
    return 0;
}

}  // namespace slvcli
