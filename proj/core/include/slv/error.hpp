#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slv {

enum class ErrorCode {
    invalid_argument,
    grid,
    singular_system,
    no_convergence,
    calibration,
    io,
    stamp_mismatch,
    out_of_range,
    config,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this type; the code is stable and is what
// the command line tool prints.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

}  // namespace slv
