#ifndef LUMPKIT_ERROR_HPP
#define LUMPKIT_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lumpkit {

enum class ErrorCode {
    // model construction / validation
    DimensionMismatch,
    NegativeEntry,
    NonStochasticRow,
    NotADistribution,
    UnknownState,
    UnknownBlock,
    NotSurjective,
    TrivialLumping,
    BadStartVector,
    ParseError,
    ValidationError,
    // analysis
    NotIrreducible,
    NotAperiodic,
    NoConvergence,
    StateSpaceTooLarge,
    HorizonTooLarge,
    KTooSmall,
    PreconditionViolated,
    ZeroMassUpdate,
    EmptyPattern,
    UnrealisablePattern,
};

std::string_view to_string(ErrorCode code);

// true for errors caused by malformed input rather than by the analysis
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Caps on exhaustive enumeration over lumped words.
///
/// A horizon n is admissible when n <= max_horizon and |Y|^n <= max_words.
/// The defaults correspond to n <= 12 with four lumped states.
struct EnumerationLimits {
    int max_horizon = 12;
    std::uint64_t max_words = 16777216;  // 4^12
    std::uint64_t max_states = 1u << 20; // k-transition lifts, |X|^k

    static EnumerationLimits unlimited() {
        return {1 << 30, UINT64_MAX, UINT64_MAX};
    }
};

// throws HorizonTooLarge when |alphabet|^length exceeds the limits
void check_horizon(std::size_t alphabet, int length, const EnumerationLimits& limits);

// saturating alphabet^length
std::uint64_t saturating_pow(std::uint64_t base, int exponent);

} // namespace lumpkit

#endif
