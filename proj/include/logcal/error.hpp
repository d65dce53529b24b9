#ifndef LOGCAL_ERROR_HPP
#define LOGCAL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace logcal {

enum class ErrorKind {
    InvalidArgument,
    UnsupportedKind,
    TruncationTooSmall,
    IndexOutOfRange,
    LengthMismatch,
    EmptyObservationSet,
    ComplementEmpty,
    MassInvariant,
    NegativeTime,
    QuadratureUnderResolved,
    QuadratureNotConverged,
    SingularOperator,
    IllConditioned,
    EigensolverFailure,
    SupportExceedsSet,
    RankAmbiguous,
    GridTooCoarse,
    UnderExcitedEigenspace,
    IncompatibleGrids,
    PoleExclusion,
    Underdetermined,
    NoExponentialDecay,
    AllPairingsVanish,
    EmptyCoverage,
    InconsistentCandidates,
    IsometryPrecondition,
    ConfigInvalid,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedKind: return "UnsupportedKind";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyObservationSet: return "EmptyObservationSet";
    case ErrorKind::ComplementEmpty: return "ComplementEmpty";
    case ErrorKind::MassInvariant: return "MassInvariant";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::SupportExceedsSet: return "SupportExceedsSet";
    case ErrorKind::RankAmbiguous: return "RankAmbiguous";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::UnderExcitedEigenspace: return "UnderExcitedEigenspace";
    case ErrorKind::IncompatibleGrids: return "IncompatibleGrids";
    case ErrorKind::PoleExclusion: return "PoleExclusion";
    case ErrorKind::Underdetermined: return "Underdetermined";
    case ErrorKind::NoExponentialDecay: return "NoExponentialDecay";
    case ErrorKind::AllPairingsVanish: return "AllPairingsVanish";
    case ErrorKind::EmptyCoverage: return "EmptyCoverage";
    case ErrorKind::InconsistentCandidates: return "InconsistentCandidates";
    case ErrorKind::IsometryPrecondition: return "IsometryPrecondition";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

} // namespace logcal

#endif // LOGCAL_ERROR_HPP
