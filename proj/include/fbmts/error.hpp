#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbmts {

enum class ErrorKind {
    invalid_size,
    degenerate_series,
    ill_conditioned,
    unfittable_series,
    domain,
    method_failure,
    input,
    configuration,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_size: return "invalid-size";
    case ErrorKind::degenerate_series: return "degenerate-series";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::unfittable_series: return "unfittable-series";
    case ErrorKind::domain: return "domain";
    case ErrorKind::method_failure: return "method-failure";
    case ErrorKind::input: return "input";
    case ErrorKind::configuration: return "configuration";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the pipeline in particular) can turn it into a per-series warning.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fbmts
