#pragma once

#include <stdexcept>
#include <string>

namespace gup {

enum class Errc {
    io_failure,
    malformed_header,
    unsupported_format,
    dimension_mismatch,
    non_finite,
    invalid_argument,
    solver_breakdown,
    solver_divergence,
    not_spd,
};

inline const char* errc_name(Errc c) {
    switch (c) {
    case Errc::io_failure:         return "io_failure";
    case Errc::malformed_header:   return "malformed_header";
    case Errc::unsupported_format: return "unsupported_format";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::non_finite:         return "non_finite";
    case Errc::invalid_argument:   return "invalid_argument";
    case Errc::solver_breakdown:   return "solver_breakdown";
    case Errc::solver_divergence:  return "solver_divergence";
    case Errc::not_spd:            return "not_spd";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace gup
