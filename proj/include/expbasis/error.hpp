#pragma once

#include <stdexcept>
#include <string>

namespace expbasis {

// Stable numeric values; they are re-exported through the C API.
enum class ErrorCode : int {
    invalid_argument = 1,
    schema = 2,
    admissibility = 3,
    quadrature = 4,
    not_certified = 5,
    ill_conditioned = 6,
    grid_unstable = 7,
    io = 8,
    internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace expbasis
