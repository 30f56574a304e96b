#include "symsq/error.hpp"

namespace symsq {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Pole: return "pole";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::ResourceLimit: return "resource limit";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::NonSimpleRoot: return "non-simple root";
        case ErrorKind::Denominator: return "denominator divisible by p";
        case ErrorKind::ParityMismatch: return "parity mismatch";
        case ErrorKind::Ramified: return "p divides the conductor";
        case ErrorKind::MissingPrime: return "missing prime data";
        case ErrorKind::UnsupportedWeight: return "unsupported weight";
        case ErrorKind::InsufficientCoefficients: return "insufficient coefficients";
        case ErrorKind::TailDominates: return "tail dominates";
        case ErrorKind::Inconsistency: return "inconsistency";
        case ErrorKind::NonCritical: return "non-critical point";
        case ErrorKind::NonOrdinary: return "non-ordinary";
        case ErrorKind::NoWitness: return "no witness";
        case ErrorKind::GroupTooLarge: return "group too large";
        case ErrorKind::Divisibility: return "divisibility";
        case ErrorKind::Usage: return "usage error";
    }
    return "error";
}

}  // namespace symsq
