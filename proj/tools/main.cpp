#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "run.hpp"
#include "slv/error.hpp"

namespace {

struct Flags {
    std::string config;
    std::map<std::string, std::string> values;  // config key -> raw flag value
    std::string leverage;
};

void add_common(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config, "key = value configuration file (flags override it)");
    const std::pair<const char*, const char*> keys[] = {
        {"case", "parameter case 1-4"},
        {"lv-surface", "smile, flat:<sigma> or an x,tau,sigma CSV file"},
        {"m1", "x mesh size"},
        {"m2", "v mesh size"},
        {"dtau", "time step, e.g. 0.005 or 1/200"},
        {"theta", "MCS parameter"},
        {"q", "inner sweeps per time level"},
        {"epsilon", "regularization of the conditional expectation"},
        {"strikes", "comma separated strikes as multiples of S0"},
        {"out", "output directory"},
    };
    for (const auto& [name, help] : keys) {
        std::string key = name;
        for (char& c : key)
            if (c == '-') c = '_';
        app.add_option_function<std::string>(std::string("--") + name,
                                              [&f, key](const std::string& v) { f.values[key] = v; }, help);
    }
}

slvcli::RunConfig make_config(const Flags& f) {
    slvcli::RunConfig cfg;
    if (!f.config.empty()) slvcli::apply_config_file(cfg, f.config);
    for (const auto& [k, v] : f.values) slvcli::apply_config_value(cfg, k, v);
    cfg.validate();
    return cfg;
}

int exit_code(slv::ErrorCode c) { return c == slv::ErrorCode::config ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calibrate an SLV leverage function to a local vol surface and price the strike ladder"};
    app.require_subcommand(1);

    Flags cal_flags, price_flags, run_flags;
    auto* cal = app.add_subcommand("calibrate", "calibrate the leverage function");
    add_common(*cal, cal_flags);
    auto* price = app.add_subcommand("price", "price the strike ladder by the four routes");
    add_common(*price, price_flags);
    price->add_option("--leverage", price_flags.leverage, "leverage CSV (default <out>/leverage.csv)");
    auto* run = app.add_subcommand("run", "calibrate, then price");
    add_common(*run, run_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cal->parsed()) return slvcli::run_calibrate(make_config(cal_flags));
        if (price->parsed()) {
            const slvcli::RunConfig cfg = make_config(price_flags);
            const std::string lev = price_flags.leverage.empty() ? cfg.out + "/leverage.csv" : price_flags.leverage;
            return slvcli::run_price(cfg, lev);
        }
        const slvcli::RunConfig cfg = make_config(run_flags);
        const int rc = slvcli::run_calibrate(cfg);
        return rc != 0 ? rc : slvcli::run_price(cfg, cfg.out + "/leverage.csv");
    } catch (const slv::Error& e) {
        std::fprintf(stderr, "slvcal: error code=%s: %s\n", std::string(slv::to_string(e.code())).c_str(), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "slvcal: error code=internal: %s\n", e.what());
        return 1;
    }
}
