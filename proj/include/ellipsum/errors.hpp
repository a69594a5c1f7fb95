#pragma once

#include <stdexcept>
#include <string>

namespace ellipsum {

enum class ErrorCode {
    dimension_mismatch,
    non_symmetric,
    not_positive_definite,
    rank_deficient,
    incomplete_weights,
    infeasible_regularizer,
    infeasible_base,
    kernel_violation,
    all_degenerate,
    not_settled,
    bad_axes,
    empty_plot,
    parse_error,
    validation_error,
    io_error,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::dimension_mismatch:     return "dimension_mismatch";
    case ErrorCode::non_symmetric:          return "non_symmetric";
    case ErrorCode::not_positive_definite:  return "not_positive_definite";
    case ErrorCode::rank_deficient:         return "rank_deficient";
    case ErrorCode::incomplete_weights:     return "incomplete_weights";
    case ErrorCode::infeasible_regularizer: return "infeasible_regularizer";
    case ErrorCode::infeasible_base:        return "infeasible_base";
    case ErrorCode::kernel_violation:       return "kernel_violation";
    case ErrorCode::all_degenerate:         return "all_degenerate";
    case ErrorCode::not_settled:            return "not_settled";
    case ErrorCode::bad_axes:               return "bad_axes";
    case ErrorCode::empty_plot:             return "empty_plot";
    case ErrorCode::parse_error:            return "parse_error";
    case ErrorCode::validation_error:       return "validation_error";
    case ErrorCode::io_error:               return "io_error";
    }
    return "unknown";
}

/// Library-wide exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace ellipsum
