#include "lumpkit/error.hpp"

#include <cmath>
#include <sstream>

namespace lumpkit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::NotADistribution: return "NotADistribution";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::NotSurjective: return "NotSurjective";
    case ErrorCode::TrivialLumping: return "TrivialLumping";
    case ErrorCode::BadStartVector: return "BadStartVector";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotAperiodic: return "NotAperiodic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::HorizonTooLarge: return "HorizonTooLarge";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ZeroMassUpdate: return "ZeroMassUpdate";
    case ErrorCode::EmptyPattern: return "EmptyPattern";
    case ErrorCode::UnrealisablePattern: return "UnrealisablePattern";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NegativeEntry:
    case ErrorCode::NonStochasticRow:
    case ErrorCode::NotADistribution:
    case ErrorCode::UnknownState:
    case ErrorCode::UnknownBlock:
    case ErrorCode::NotSurjective:
    case ErrorCode::TrivialLumping:
    case ErrorCode::BadStartVector:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
        return true;
    default:
        return false;
    }
}

std::uint64_t saturating_pow(std::uint64_t base, int exponent) {
    std::uint64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && result > UINT64_MAX / base) {
            return UINT64_MAX;
        }
        result *= base;
    }
    return result;
}

void check_horizon(std::size_t alphabet, int length, const EnumerationLimits& limits) {
    if (length > limits.max_horizon || saturating_pow(alphabet, length) > limits.max_words) {
        std::ostringstream msg;
        msg << "horizon " << length << " over " << alphabet
            << " lumped states exceeds the enumeration cap (max horizon "
            << limits.max_horizon << ", max words " << limits.max_words << ")";
        throw Error(ErrorCode::HorizonTooLarge, msg.str());
    }
}

} // namespace lumpkit
