#include "qecho/error.hpp"

namespace qecho {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_chain: return "invalid-chain";
    case ErrorCode::zero_critical_point: return "zero-critical-point";
    case ErrorCode::nonpositive_rate: return "nonpositive-rate";
    case ErrorCode::negative_duration: return "negative-duration";
    case ErrorCode::empty_schedule: return "empty-schedule";
    case ErrorCode::discontinuous_join: return "discontinuous-join";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::bounds_error: return "bounds-error";
    case ErrorCode::step_underflow: return "step-underflow";
    case ErrorCode::tolerance_not_met: return "tolerance-not-met";
    case ErrorCode::count_mismatch: return "count-mismatch";
    case ErrorCode::pole: return "pole";
    case ErrorCode::invalid_turnaround: return "invalid-turnaround";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::no_bracket: return "no-bracket";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

bool is_numeric_failure(ErrorCode code) {
    return code == ErrorCode::step_underflow || code == ErrorCode::tolerance_not_met ||
           code == ErrorCode::no_bracket;
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace qecho
