#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symsq {

enum class ErrorKind {
    Domain,
    Pole,
    NonConvergence,
    ResourceLimit,
    Parse,
    NonSimpleRoot,
    Denominator,
    ParityMismatch,
    Ramified,
    MissingPrime,
    UnsupportedWeight,
    InsufficientCoefficients,
    TailDominates,
    Inconsistency,
    NonCritical,
    NonOrdinary,
    NoWitness,
    GroupTooLarge,
    Divisibility,
    Usage,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated so the CLI can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace symsq
