#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pir {

/// Failure categories raised by the library. Every throw site uses one of
/// these so callers (and the CLI exit-code mapping) can branch on the kind.
enum class ErrorKind {
    ShapeMismatch,
    IndexOutOfRange,
    RankDeficient,
    UnderDetermined,
    TooFewPoints,
    NonPositivePopulation,
    DegenerateDenominator,
    NonFiniteState,
    DivisionByZero,
    NegativeCompartment,
    MissingColumn,
    ParseError,
    NonMonotonicDates,
    RegionTooSmall,
    AllZeroColumn,
    NonPhysical,
    DimensionMismatch,
    MissingField,
    InvalidArgument,
    IoError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace pir
