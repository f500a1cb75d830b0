#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helix {

enum class ErrorCode {
    ZeroMass,
    DegenerateMetric,
    ComplexAnisotropy,
    RecurrenceBreakdown,
    SingularPath,
    NonConvergence,
    SingularArgument,
    ZeroTwist,
    DegenerateAnisotropy,
    ComplexDiscriminant,
    NoRootInWindow,
    InvalidLine,
    NotAnEigenvalue,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::ComplexAnisotropy: return "ComplexAnisotropy";
    case ErrorCode::RecurrenceBreakdown: return "RecurrenceBreakdown";
    case ErrorCode::SingularPath: return "SingularPath";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularArgument: return "SingularArgument";
    case ErrorCode::ZeroTwist: return "ZeroTwist";
    case ErrorCode::DegenerateAnisotropy: return "DegenerateAnisotropy";
    case ErrorCode::ComplexDiscriminant: return "ComplexDiscriminant";
    case ErrorCode::NoRootInWindow: return "NoRootInWindow";
    case ErrorCode::InvalidLine: return "InvalidLine";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace helix
