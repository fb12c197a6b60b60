#pragma once

#include <stdexcept>
#include <string>

namespace idseries {

enum class ErrorCode {
    invalid_argument,
    dimension_mismatch,
    range,
    not_converged,
    internal,
    parse,
    missing_input,
    bound_violation,
};

const char* to_string(ErrorCode code) noexcept;

/// Library error. `module()` names the component that raised it; the CLI
/// prints it as `ERROR:<module>:<code> <message>`.
class Error : public std::runtime_error {
public:
    Error(std::string module, ErrorCode code, const std::string& message)
        : std::runtime_error(message), module_(std::move(module)), code_(code) {}

    const std::string& module() const noexcept { return module_; }
    ErrorCode code() const noexcept { return code_; }

private:
    std::string module_;
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::range: return "range";
        case ErrorCode::not_converged: return "not_converged";
        case ErrorCode::internal: return "internal";
        case ErrorCode::parse: return "parse";
        case ErrorCode::missing_input: return "missing_input";
        case ErrorCode::bound_violation: return "bound_violation";
    }
    return "unknown";
}

}  // namespace idseries
