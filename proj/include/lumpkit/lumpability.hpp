#ifndef LUMPKIT_LUMPABILITY_HPP
#define LUMPKIT_LUMPABILITY_HPP

#include <optional>
#include <vector>

#include "lumpkit/chain.hpp"
#include "lumpkit/entropy.hpp"
#include "lumpkit/lumping.hpp"

namespace lumpkit {

inline constexpr double kLumpabilityTolerance = 1e-9;

/// Conditioning event on which two conditional laws of the next symbol differ.
struct LumpabilityWitness {
    // lumped word conditioned on (for the strong check: Y_1 .. Y_{k-1})
    BlockWord word;
    // strong check only: the initial state X_0
    std::optional<std::size_t> state;
    std::size_t next_block = 0;
    // probability of next_block given the finer and the coarser condition
    double p_fine = 0.0;
    double p_coarse = 0.0;

    bool operator==(const LumpabilityWitness&) const = default;
};

struct WeakVerdict {
    bool verdict = false;
    // no claim is made beyond this horizon
    int horizon = 0;

    bool operator==(const WeakVerdict&) const = default;
};

struct LumpabilityVerdict {
    int order_k = 0;
    std::optional<bool> strong;
    std::optional<WeakVerdict> weak;
    std::optional<LumpabilityWitness> witness;

    // strong check: H(Y_k | Y_[1,k-1], X_0) and H(Y_k | Y_[0,k-1]) and whether
    // their equality agrees with the probability verdict
    std::optional<double> entropy_given_state;
    std::optional<double> entropy_given_block;
    std::optional<bool> entropy_agrees;

    // weak check: entry m - 1 is H(Y_m | Y_[0,m-1]), m = 1 .. horizon
    std::vector<double> conditional_entropies;
};

/// Compares p(Y_k | Y_[1,k-1], X_0 = x) with p(Y_k | Y_[1,k-1], Y_0 = g(x))
/// for every conditioning event of positive mass.
LumpabilityVerdict check_strong_lumpable(const MarkovChain& chain, const Lumping& lumping, int k,
                                         double tol = kLumpabilityTolerance,
                                         const EnumerationLimits& limits = {});

/// Compares p(Y_m | Y_[0,m-1]) with p(Y_m | Y_[m-k,m-1]) for every m in
/// [k, horizon] under the stationary law. The verdict says nothing about
/// horizons beyond `horizon`.
LumpabilityVerdict check_weak_lumpable(const MarkovChain& chain, const Lumping& lumping, int k, int horizon,
                                       double tol = kLumpabilityTolerance,
                                       const EnumerationLimits& limits = {});

struct LossBound {
    SplitMergeWitness witness;
    double loss_entropy = 0.0;     // L
    double alpha = 0.0;            // P(witness path) / (2 (kappa + 2))
    double rate_lower_bound = 0.0; // alpha L
    double growth_constant = 1.0;  // 2^alpha
    // number of paths in the unreconstructable set
    std::size_t ambiguous_paths = 0;

    bool operator==(const LossBound&) const = default;
};

/// Certified lower bound on H(X) - H(Y); absent iff kappa is infinite.
/// Among minimal witnesses the one maximising alpha L is reported, with
/// ties broken by (check_state, lumped word, hat_state).
std::optional<LossBound> entropy_loss_bound(const MarkovChain& chain, const Lumping& lumping);

struct BlockEntropyCheck {
    int n = 0;
    double bound = 0.0;
    double actual = 0.0;
    bool satisfied = false;
};

/// H(X_[n] | Y_[n]) <= 2 ld(|X| - |Y| + 1), valid while n - 2 < kappa.
/// Throws PreconditionViolated otherwise.
BlockEntropyCheck block_entropy_bound_check(const MarkovChain& chain, const Lumping& lumping, int n,
                                            const EnumerationLimits& limits = {});

} // namespace lumpkit

#endif
