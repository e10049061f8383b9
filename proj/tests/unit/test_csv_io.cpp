#include <gtest/gtest.h>

#include <sstream>

#include "slv/csv_io.hpp"
#include "slv/error.hpp"

namespace {

slv::LeverageSurface sample_surface() {
    slv::LeverageSurface s({-0.5, 0.1 / 3.0, 0.7}, slv::LeverageStamp{3, 7, 1.0 / 200.0, 0.5, 2, -0.5, 0.7});
    s.add_level(0.0, {1.0 / 3.0, 2.0 / 7.0, 0.9});
    s.add_level(0.0025, {0.1, 0.2, 0.3});
    return s;
}

TEST(LeverageCsv, RoundTripIsBitExact) {
    const auto s = sample_surface();
    std::stringstream ss;
    slv::write_leverage_csv(ss, s);
    const auto r = slv::read_leverage_csv(ss);
    EXPECT_EQ(r.x_nodes(), s.x_nodes());
    EXPECT_EQ(r.taus(), s.taus());
    for (std::size_t k = 0; k < s.level_count(); ++k) EXPECT_EQ(r.level(k), s.level(k));
    EXPECT_EQ(r.stamp().m2, 7u);
    EXPECT_EQ(r.stamp().dtau, 1.0 / 200.0);
    EXPECT_EQ(r.stamp().rannacher_steps, 2u);
}

TEST(LeverageCsv, MissingStampIsRejected) {
    std::stringstream ss("tau,x,sigma_slv\n0,0,1\n");
    try {
        slv::read_leverage_csv(ss);
        FAIL();
    } catch (const slv::Error& e) {
        EXPECT_EQ(e.code(), slv::ErrorCode::stamp_mismatch);
    }
}

TEST(LeverageCsv, OffMeshRowsAreRejected) {
    std::stringstream ss(
        "# m1=2 m2=4 dtau=0.1 maturity=1 rannacher=0 x_min=0 x_max=1\n"
        "tau,x,sigma_slv\n0,0,1\n0,1,1\n0.1,0,1\n0.1,0.5,1\n");
    EXPECT_THROW(slv::read_leverage_csv(ss), slv::Error);
}

TEST(LvCsv, RoundTripAndEvaluation) {
    const auto s = slv::smile_lv_surface(0.5);
    std::stringstream ss;
    slv::write_lv_surface_csv(ss, s);
    const auto r = slv::read_lv_surface_csv(ss);
    EXPECT_EQ(r.x_samples(), s.x_samples());
    EXPECT_EQ(r.tau_samples(), s.tau_samples());
    EXPECT_EQ(r.values(), s.values());
}

TEST(LvCsv, RowOrderDoesNotMatter) {
    std::stringstream ss("x,tau,sigma\n1,0,0.2\n0,1,0.3\n0,0,0.1\n1,1,0.4\n");
    const auto r = slv::read_lv_surface_csv(ss);
    EXPECT_DOUBLE_EQ(r(0.0, 1.0), 0.3);
    EXPECT_DOUBLE_EQ(r(1.0, 0.0), 0.2);
}

TEST(LvCsv, MalformedInputIsRejected) {
    for (const char* text : {"x,tau,sigma\n0,0,0.1\n1,0,0.1\n0,1,0.1\n",   // ragged
                             "x,tau,sigma\n0,0,0.1\n0,0,0.2\n",             // duplicate
                             "x,tau,vol\n0,0,0.1\n",                        // header
                             "x,tau,sigma\n0,0,abc\n",                      // number
                             "x,tau,sigma\n0,0,-0.1\n",                     // sign
                             ""}) {
        std::stringstream ss(text);
        try {
            slv::read_lv_surface_csv(ss);
            FAIL() << text;
        } catch (const slv::Error& e) {
            EXPECT_EQ(e.code(), slv::ErrorCode::io) << text;
        }
    }
}

TEST(ReportCsv, HeaderAndRows) {
    slv::PriceReport rep;
    rep.maturity = 0.5;
    rep.discount = 0.9;
    slv::PriceRow row;
    row.k_over_s0 = 1.0;
    row.fv = {1.0, 1.0, 1.0, 1.0};
    row.fv_disc = {0.9, 0.9, 0.9, 0.9};
    rep.rows.push_back(row);
    std::stringstream ss;
    slv::write_report_csv(ss, rep, "1", true);
    std::string header, line;
    std::getline(ss, header);
    std::getline(ss, line);
    EXPECT_EQ(header,
              "case,K_over_S0,FV_LVB,FV_LVF,FV_SLVB,FV_SLVF,eps_r_LVF,eps_r_SLVB,eps_r_SLVF,iv_LVB,eps_LVF,eps_SLVB,"
              "eps_SLVF");
    EXPECT_EQ(line.rfind("1,1,0.9", 0), 0u);
}

TEST(DensityCsv, OneRowPerNode) {
    const auto g = slv::build_grid(slv::default_grid_spec(slv::case_params(1), 10, 8));
    std::vector<double> p(g.size(), 0.0);
    std::stringstream ss;
    slv::write_density_csv(ss, g, p);
    std::size_t lines = 0;
    for (std::string l; std::getline(ss, l);) ++lines;
    EXPECT_EQ(lines, 1u + 80u);
    EXPECT_THROW(slv::write_density_csv(ss, g, std::vector<double>(3)), slv::Error);
}

}  // namespace
