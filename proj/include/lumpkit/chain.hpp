#ifndef LUMPKIT_CHAIN_HPP
#define LUMPKIT_CHAIN_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lumpkit/error.hpp"

namespace lumpkit {

using StateWord = std::vector<std::size_t>;

/// Row sums may deviate from one by at most this much on input.
inline constexpr double kRowSumTolerance = 1e-9;
/// Entries at or below this are structural zeros unless exact-zero mode is on.
inline constexpr double kPositivityThreshold = 1e-15;
inline constexpr double kStationaryTolerance = 1e-12;

struct ChainOptions {
    // only a literal 0 is a non-edge
    bool exact_zero = false;
    // accept irreducible periodic chains in the analysis entry points
    bool allow_periodic = false;
};

struct StationaryDistribution {
    Eigen::VectorXd probs;

    double operator[](std::size_t i) const { return probs[static_cast<Eigen::Index>(i)]; }
    std::size_t size() const { return static_cast<std::size_t>(probs.size()); }
};

struct TransitionGraph {
    // adjacency[i][j] iff transition(i, j) > 0
    std::vector<std::vector<bool>> adjacency;

    std::size_t size() const { return adjacency.size(); }
    bool edge(std::size_t i, std::size_t j) const { return adjacency[i][j]; }
    std::size_t edge_count() const;
};

struct PeriodicityReport {
    bool irreducible = false;
    bool aperiodic = false;
    // gcd of the cycle lengths through state 0; 0 when no cycle passes through it
    int period = 0;
};

/// A finite, time-homogeneous Markov chain.
///
/// The transition matrix is validated on construction and is immutable
/// afterwards. Rows are renormalised so that they sum to one within 1e-12.
/// Without exact-zero mode, entries at or below kPositivityThreshold are
/// replaced by structural zeros. The stationary distribution is computed
/// on first use and cached; copies share the cache.
class MarkovChain {
public:
    MarkovChain(Eigen::MatrixXd transition, std::vector<std::string> labels = {},
                std::optional<Eigen::VectorXd> initial = std::nullopt,
                ChainOptions options = {});

    std::size_t size() const { return labels_.size(); }
    const Eigen::MatrixXd& transition() const { return transition_; }
    double prob(std::size_t from, std::size_t to) const {
        return transition_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
    }
    bool has_edge(std::size_t from, std::size_t to) const { return prob(from, to) > 0.0; }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    std::optional<std::size_t> find_state(std::string_view label) const;
    // throws UnknownState
    std::size_t index_of(std::string_view label) const;

    const std::optional<Eigen::VectorXd>& initial() const { return initial_; }
    const ChainOptions& options() const { return options_; }

    // successors of each state with positive probability, ascending
    const std::vector<std::vector<std::size_t>>& successors() const { return successors_; }

    TransitionGraph graph() const;

    /// Cached stationary distribution at kStationaryTolerance.
    /// Throws NotIrreducible, NotAperiodic or NoConvergence.
    const StationaryDistribution& stationary() const;

private:
    struct Cache;

    Eigen::MatrixXd transition_;
    std::vector<std::string> labels_;
    std::optional<Eigen::VectorXd> initial_;
    ChainOptions options_;
    std::vector<std::vector<std::size_t>> successors_;
    std::shared_ptr<Cache> cache_;
};

MarkovChain build_chain(const std::vector<std::vector<double>>& matrix,
                        std::vector<std::string> states = {},
                        std::optional<std::vector<double>> initial = std::nullopt,
                        ChainOptions options = {});

PeriodicityReport check_irreducible_aperiodic(const MarkovChain& chain);

/// Solves mu (P - I) = 0, sum(mu) = 1 directly; falls back to power
/// iteration on the lazy chain (P + I) / 2 if the residual exceeds tol.
StationaryDistribution stationary_distribution(const MarkovChain& chain,
                                               double tol = kStationaryTolerance);

/// Time reversal of the stationary chain: Phat(i, j) = mu_j P(j, i) / mu_i.
MarkovChain reverse_chain(const MarkovChain& chain);

struct KTransitionChain {
    MarkovChain chain;
    // realisable length-k words, one per lifted state, lexicographic order
    std::vector<StateWord> words;
    // mu(w_1) * prod P(w_i, w_{i+1})
    Eigen::VectorXd word_mass;
};

/// Chain on realisable length-k windows. Throws StateSpaceTooLarge when
/// |X|^k exceeds limits.max_states.
KTransitionChain k_transition_chain(const MarkovChain& chain, int k,
                                    const EnumerationLimits& limits = {});

/// Probability of observing `path` from `start` (default: the chain's initial
/// distribution, or the stationary one if none was given).
double path_probability(const MarkovChain& chain, std::span<const std::size_t> path,
                        const std::optional<Eigen::VectorXd>& start = std::nullopt);
double path_probability(const MarkovChain& chain, const std::vector<std::string>& path,
                        const std::optional<Eigen::VectorXd>& start = std::nullopt);

// throws NotIrreducible / NotAperiodic according to the chain's options
void require_ergodic(const MarkovChain& chain);

} // namespace lumpkit

#endif
