#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epscope {

enum class ErrorKind {
    InvalidArgument,
    BranchPointSingularity,
    DegenerateCoupling,
    OutsideResonanceWindow,
    OutsideWindow,
    NoConvergence,
    AtExceptionalPoint,
    InsufficientSpan,
    IllConditioned,
    ContourTooLarge,
    NonIntegerWinding,
    TrackingAmbiguity,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::BranchPointSingularity: return "BranchPointSingularity";
        case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
        case ErrorKind::OutsideResonanceWindow: return "OutsideResonanceWindow";
        case ErrorKind::OutsideWindow: return "OutsideWindow";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::AtExceptionalPoint: return "AtExceptionalPoint";
        case ErrorKind::InsufficientSpan: return "InsufficientSpan";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::ContourTooLarge: return "ContourTooLarge";
        case ErrorKind::NonIntegerWinding: return "NonIntegerWinding";
        case ErrorKind::TrackingAmbiguity: return "TrackingAmbiguity";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace epscope
