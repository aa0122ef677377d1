#ifndef LUMPKIT_ENTROPY_HPP
#define LUMPKIT_ENTROPY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "lumpkit/chain.hpp"
#include "lumpkit/lumping.hpp"

namespace lumpkit {

// all entropies are in bits

inline constexpr double kDistributionTolerance = 1e-9;
// conditioning events lighter than this are dropped
inline constexpr double kMassThreshold = 1e-15;

/// -sum p ld p, with 0 ld 0 = 0. Throws NotADistribution.
double shannon_entropy(std::span<const double> dist);
double shannon_entropy(const Eigen::VectorXd& dist);

/// H(Z | W) for a joint distribution with rows indexed by W and columns by Z.
double conditional_entropy(const Eigen::MatrixXd& joint);

/// Joint law of (X_0, Y_1) for the stationary chain: mu(x) P(x, g^-1(y)).
Eigen::MatrixXd state_block_joint(const MarkovChain& chain, const Lumping& lumping);

/// H(X_1 | X_0) = sum_x mu(x) H(P(x, .)).
double chain_entropy_rate(const MarkovChain& chain);

/// H(X_[n]) = H(mu) + (n - 1) H(X_1 | X_0).
double block_entropy(const MarkovChain& chain, int n);

/// H(Y_[n]) by a forward pass over lumped words. Throws HorizonTooLarge.
double lumped_block_entropy(const MarkovChain& chain, const Lumping& lumping, int n,
                            const EnumerationLimits& limits = {});

struct EntropyBounds {
    int horizon = 0;
    double lower = 0.0; // H(Y_n | Y_[1,n-1], X_0)
    double upper = 0.0; // H(Y_n | Y_[0,n-1])

    bool operator==(const EntropyBounds&) const = default;
};

EntropyBounds lumped_rate_bounds(const MarkovChain& chain, const Lumping& lumping, int n,
                                 const EnumerationLimits& limits = {});

struct LossInterval {
    int horizon = 0;
    double loss_lower = 0.0; // H(X) - upper, clamped at 0
    double loss_upper = 0.0; // H(X) - lower

    bool operator==(const LossInterval&) const = default;
};

/// Interval for the information lost per step, H(X) - H(Y).
LossInterval conditional_entropy_rate_estimate(const MarkovChain& chain, const Lumping& lumping, int n,
                                               const EnumerationLimits& limits = {});

struct BeliefState {
    Eigen::VectorXd weights;
};

/// Distribution of the next lumped symbol given the belief w:
/// r_y(w) = sum over x' in g^-1(y) of (wP)(x').
Eigen::VectorXd predict_blocks(const MarkovChain& chain, const Lumping& lumping, const BeliefState& belief);

/// Filter update after observing block y. Throws ZeroMassUpdate if r_y(w) = 0.
BeliefState update_belief(const MarkovChain& chain, const Lumping& lumping, const BeliefState& belief,
                          std::size_t block);

struct BlackwellConfig {
    std::uint64_t steps = 100000;
    // default: 10% of steps
    std::optional<std::uint64_t> burn_in;
    std::uint64_t seed = 0;
    std::uint64_t batches = 50;
};

struct BlackwellEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t seed = 0;
    std::string caveat;

    bool operator==(const BlackwellEstimate&) const = default;
};

/// Time average of H(r(w_t)) along a simulated belief trajectory; the
/// standard error comes from batch means.
BlackwellEstimate blackwell_entropy_estimate(const MarkovChain& chain, const Lumping& lumping,
                                             const BlackwellConfig& config);

} // namespace lumpkit

#endif
