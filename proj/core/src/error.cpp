#include "slv/error.hpp"

namespace slv {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::grid: return "grid";
        case ErrorCode::singular_system: return "singular_system";
        case ErrorCode::no_convergence: return "no_convergence";
        case ErrorCode::calibration: return "calibration";
        case ErrorCode::io: return "io";
        case ErrorCode::stamp_mismatch: return "stamp_mismatch";
        case ErrorCode::out_of_range: return "out_of_range";
        case ErrorCode::config: return "config";
    }
    return "unknown";
}

}  // namespace slv
