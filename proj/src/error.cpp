#include "expbasis/error.hpp"

namespace expbasis {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::schema: return "schema_violation";
        case ErrorCode::admissibility: return "admissibility_violation";
        case ErrorCode::quadrature: return "quadrature_nonconvergence";
        case ErrorCode::not_certified: return "not_certified";
        case ErrorCode::ill_conditioned: return "ill_conditioned";
        case ErrorCode::grid_unstable: return "grid_unstable";
        case ErrorCode::io: return "io_error";
        case ErrorCode::internal: return "internal_error";
    }
    return "unknown";
}

}  // namespace expbasis
