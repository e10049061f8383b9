#include "slv/csv_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "slv/error.hpp"

namespace slv {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw Error(ErrorCode::io, "line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open " + path);
    return in;
}

void expect_header(const std::string& line, const std::vector<std::string>& names, std::size_t line_no) {
    if (split(line) != names) {
        std::string want;
        for (const auto& n : names) want += (want.empty() ? "" : ",") + n;
        throw Error(ErrorCode::io, "line " + std::to_string(line_no) + ": expected header '" + want + "'");
    }
}

// Reads rows of three numbers after the header; blank lines are skipped.
std::vector<std::array<double, 3>> read_triples(std::istream& in, std::size_t& line_no) {
    std::vector<std::array<double, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() != 3)
            throw Error(ErrorCode::io, "line " + std::to_string(line_no) + ": expected 3 fields, got " +
                                           std::to_string(f.size()));
        rows.push_back({parse_number(f[0], line_no), parse_number(f[1], line_no), parse_number(f[2], line_no)});
    }
    return rows;
}

}  // namespace

LvSurface read_lv_surface_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, "empty local volatility file");
    expect_header(line, {"x", "tau", "sigma"}, line_no);
    const auto rows = read_triples(in, line_no);
    require(!rows.empty(), ErrorCode::io, "local volatility file has no samples");

    std::map<std::pair<double, double>, double> samples;
    std::vector<double> xs, taus;
    for (const auto& r : rows) {
        if (!samples.emplace(std::make_pair(r[0], r[1]), r[2]).second)
            throw Error(ErrorCode::io, "duplicate local volatility sample at x=" + fmt(r[0]) + " tau=" + fmt(r[1]));
        xs.push_back(r[0]);
        taus.push_back(r[1]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    require(samples.size() == xs.size() * taus.size(), ErrorCode::io,
            "local volatility samples do not form a complete x-by-tau grid (ragged input)");

    std::vector<double> values;
    values.reserve(samples.size());
    for (double x : xs)
        for (double t : taus) values.push_back(samples.at({x, t}));
    try {
        return LvSurface(std::move(xs), std::move(taus), std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorCode::io, std::string("invalid local volatility surface: ") + e.what());
    }
}

LvSurface read_lv_surface_csv(const std::string& path) {
    auto in = open_in(path);
    return read_lv_surface_csv(in);
}

void write_lv_surface_csv(std::ostream& out, const LvSurface& surface) {
    out << "x,tau,sigma\n";
    const auto& xs = surface.x_samples();
    const auto& ts = surface.tau_samples();
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t k = 0; k < ts.size(); ++k)
            out << fmt(xs[i]) << ',' << fmt(ts[k]) << ',' << fmt(surface.values()[i * ts.size() + k]) << '\n';
}

void write_leverage_csv(std::ostream& out, const LeverageSurface& surface) {
    const LeverageStamp& s = surface.stamp();
    out << "# m1=" << s.m1 << " m2=" << s.m2 << " dtau=" << fmt(s.dtau) << " maturity=" << fmt(s.maturity)
        << " rannacher=" << s.rannacher_steps << " x_min=" << fmt(s.x_min) << " x_max=" << fmt(s.x_max) << '\n';
    out << "tau,x,sigma_slv\n";
    const auto& x = surface.x_nodes();
    for (std::size_t k = 0; k < surface.level_count(); ++k) {
        const std::string tau = fmt(surface.taus()[k]);
        const auto& lev = surface.level(k);
        for (std::size_t i = 0; i < x.size(); ++i) out << tau << ',' << fmt(x[i]) << ',' << fmt(lev[i]) << '\n';
    }
}

void write_leverage_csv(const std::string& path, const LeverageSurface& surface) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot write " + path);
    write_leverage_csv(out, surface);
    require(out.good(), ErrorCode::io, "write failed for " + path);
}

LeverageSurface read_leverage_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    require(static_cast<bool>(std::getline(in, line)) && line.rfind('#', 0) == 0, ErrorCode::stamp_mismatch,
            "leverage file has no stamp line");
    std::map<std::string, std::string> kv;
    {
        std::istringstream ss(line.substr(1));
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    for (const char* key : {"m1", "m2", "dtau", "maturity", "rannacher", "x_min", "x_max"})
        require(kv.count(key) == 1, ErrorCode::stamp_mismatch, std::string("leverage stamp lacks '") + key + "'");
    LeverageStamp stamp;
    stamp.m1 = static_cast<std::size_t>(parse_number(kv["m1"], 1));
    stamp.m2 = static_cast<std::size_t>(parse_number(kv["m2"], 1));
    stamp.dtau = parse_number(kv["dtau"], 1);
    stamp.maturity = parse_number(kv["maturity"], 1);
    stamp.rannacher_steps = static_cast<std::size_t>(parse_number(kv["rannacher"], 1));
    stamp.x_min = parse_number(kv["x_min"], 1);
    stamp.x_max = parse_number(kv["x_max"], 1);

    ++line_no;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, "leverage file has no header");
    expect_header(line, {"tau", "x", "sigma_slv"}, line_no);
    const auto rows = read_triples(in, line_no);
    require(stamp.m1 > 0 && !rows.empty() && rows.size() % stamp.m1 == 0, ErrorCode::io,
            "leverage file row count is not a multiple of m1");

    std::vector<double> x(stamp.m1);
    for (std::size_t i = 0; i < stamp.m1; ++i) x[i] = rows[i][1];
    LeverageSurface surface(x, stamp);
    for (std::size_t k = 0; k < rows.size() / stamp.m1; ++k) {
        std::vector<double> lev(stamp.m1);
        const double tau = rows[k * stamp.m1][0];
        for (std::size_t i = 0; i < stamp.m1; ++i) {
            const auto& r = rows[k * stamp.m1 + i];
            require(r[0] == tau && r[1] == x[i], ErrorCode::io,
                    "leverage file level " + std::to_string(k) + " is not on the stamped x mesh");
            lev[i] = r[2];
        }
        surface.add_level(tau, std::move(lev));
    }
    return surface;
}

LeverageSurface read_leverage_csv(const std::string& path) {
    auto in = open_in(path);
    return read_leverage_csv(in);
}

void write_density_csv(std::ostream& out, const Grid2D& grid, std::span<const double> pbar) {
    require(pbar.size() == grid.size(), ErrorCode::invalid_argument, "density does not match the grid");
    out << "x,v,pbar\n";
    for (std::size_t j = 0; j < grid.m2(); ++j)
        for (std::size_t i = 0; i < grid.m1(); ++i)
            out << fmt(grid.gx.nodes[i]) << ',' << fmt(grid.gv.nodes[j]) << ',' << fmt(pbar[grid.index(i, j)])
                << '\n';
}

void write_report_csv(std::ostream& out, const PriceReport& report, std::string_view case_label, bool discounted) {
    out << "case,K_over_S0,FV_LVB,FV_LVF,FV_SLVB,FV_SLVF,eps_r_LVF,eps_r_SLVB,eps_r_SLVF,iv_LVB,eps_LVF,eps_SLVB,"
           "eps_SLVF\n";
    for (const auto& r : report.rows) {
        const auto& fv = discounted ? r.fv_disc : r.fv;
        out << case_label << ',' << fmt(r.k_over_s0);
        for (double v : fv) out << ',' << fmt(v);
        for (std::size_t m = 1; m < route_count; ++m) out << ',' << fmt(r.rel_error[m]);
        out << ',' << fmt(r.iv_percent[0]);
        for (std::size_t m = 1; m < route_count; ++m) out << ',' << fmt(r.iv_error[m]);
        out << '\n';
    }
}

}  // namespace slv
