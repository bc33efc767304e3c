#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qecho {

// Every precondition failure in the library maps onto one of these codes.
enum class ErrorCode {
    invalid_chain,
    zero_critical_point,
    nonpositive_rate,
    negative_duration,
    empty_schedule,
    discontinuous_join,
    out_of_domain,
    bounds_error,
    step_underflow,
    tolerance_not_met,
    count_mismatch,
    pole,
    invalid_turnaround,
    invalid_argument,
    no_bracket,
    config_error,
    io_error,
};

std::string_view to_string(ErrorCode code);

// True for failures that come out of the numerics rather than the inputs.
bool is_numeric_failure(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

} // namespace qecho
