#pragma once

#include <stdexcept>
#include <string>

namespace gwc {

enum class error_kind {
    invalid_argument,
    bad_pmf,
    mass_at_zero,
    not_supercritical,
    domain_error,
    base_point_mismatch,
    order_exceeded,
    quadrature_failure,
    sample_too_large,
    resource_limit,
};

const char* to_string(error_kind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so the
/// command-line layer can map it onto an exit code.
class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

inline const char* to_string(error_kind kind) noexcept
{
    switch (kind) {
    case error_kind::invalid_argument: return "InvalidArgument";
    case error_kind::bad_pmf: return "BadPmf";
    case error_kind::mass_at_zero: return "MassAtZero";
    case error_kind::not_supercritical: return "NotSupercritical";
    case error_kind::domain_error: return "DomainError";
    case error_kind::base_point_mismatch: return "BasePointMismatch";
    case error_kind::order_exceeded: return "OrderExceeded";
    case error_kind::quadrature_failure: return "QuadratureFailure";
    case error_kind::sample_too_large: return "SampleTooLarge";
    case error_kind::resource_limit: return "ResourceLimit";
    }
    return "Unknown";
}

} // namespace gwc
