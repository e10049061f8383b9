#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "slv/calibrate.hpp"
#include "slv/mesh.hpp"
#include "slv/model.hpp"
#include "slv/pricing.hpp"

namespace slv {

// Local volatility surface: header `x,tau,sigma`, one row per sample. The
// samples must form a complete x-by-tau tensor grid.
LvSurface read_lv_surface_csv(std::istream& in);
LvSurface read_lv_surface_csv(const std::string& path);
void write_lv_surface_csv(std::ostream& out, const LvSurface& surface);

// Leverage surface: a `#` stamp line, then `tau,x,sigma_slv` rows, level by level.
void write_leverage_csv(std::ostream& out, const LeverageSurface& surface);
void write_leverage_csv(const std::string& path, const LeverageSurface& surface);
LeverageSurface read_leverage_csv(std::istream& in);
LeverageSurface read_leverage_csv(const std::string& path);

// Density: `x,v,pbar`.
void write_density_csv(std::ostream& out, const Grid2D& grid, std::span<const double> pbar);

// Report: one row per strike; `discounted` selects the FV columns.
void write_report_csv(std::ostream& out, const PriceReport& report, std::string_view case_label, bool discounted);

}  // namespace slv
