#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace basket_taylor {

enum class ErrorCode {
    NonPositiveInput,
    NotPositiveDefinite,
    InvalidArgument,
    NonpositiveStrike,
    OrderCapExceeded,
    SingularConditioning,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonpositiveStrike: return "NonpositiveStrike";
        case ErrorCode::OrderCapExceeded: return "OrderCapExceeded";
        case ErrorCode::SingularConditioning: return "SingularConditioning";
    }
    return "Unknown";
}

/// Raised by every validating operation. `field()` names the offending input
/// (e.g. "vols[1]") when there is one.
class PricingError : public std::runtime_error {
public:
    PricingError(ErrorCode code, std::string field, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + (field.empty() ? "" : " (" + field + ")") +
                             ": " + detail),
          code_(code),
          field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

}  // namespace basket_taylor
