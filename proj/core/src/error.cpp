#include "pir/error.hpp"

namespace pir {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::UnderDetermined: return "UnderDetermined";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::NonPositivePopulation: return "NonPositivePopulation";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::NegativeCompartment: return "NegativeCompartment";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::NonMonotonicDates: return "NonMonotonicDates";
        case ErrorKind::RegionTooSmall: return "RegionTooSmall";
        case ErrorKind::AllZeroColumn: return "AllZeroColumn";
        case ErrorKind::NonPhysical: return "NonPhysical";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::MissingField: return "MissingField";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace pir
