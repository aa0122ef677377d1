#ifndef LUMPKIT_SIMULATE_HPP
#define LUMPKIT_SIMULATE_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lumpkit/chain.hpp"
#include "lumpkit/lumping.hpp"

namespace lumpkit {

struct StationaryStart {};
struct DeltaStart {
    std::size_t state = 0;
};
struct CustomStart {
    Eigen::VectorXd weights;
};
using StartMode = std::variant<StationaryStart, DeltaStart, CustomStart>;

struct Trajectory {
    StateWord states;
    std::uint64_t seed = 0;
    StartMode start_mode;
};

/// Reproducible sample path of `length` states. Throws BadStartVector.
Trajectory sample_trajectory(const MarkovChain& chain, std::size_t length, const StartMode& start,
                             std::uint64_t seed, std::uint64_t stream = 0);

/// Positions are 1-based.
struct TraversalStats {
    StateWord pattern;
    // times the single-state pattern is occupied; empty for longer patterns
    std::vector<std::size_t> occupation;
    // every start position of the pattern
    std::vector<std::size_t> traversal;
    // greedy left-to-right selection of pairwise disjoint occurrences
    std::vector<std::size_t> non_overlapping;
};

/// Throws EmptyPattern, or PreconditionViolated if the pattern is longer than
/// the trajectory.
TraversalStats traversal_stats(const StateWord& trajectory, const StateWord& pattern);

inline const std::vector<std::size_t> kDefaultCheckpoints{10, 50, 100, 500, 2000};

struct GrowthPoint {
    std::size_t n = 0;
    // one entry per seed, in ascending seed order
    std::vector<std::uint64_t> counts;
    std::vector<double> log2_counts;
    std::uint64_t max_count = 0;
    // geometric mean over seeds of T_n^(1/n), and its minimum
    double mean_rate = 0.0;
    double min_rate = 0.0;
};

struct GrowthStats {
    std::size_t length = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<GrowthPoint> points;
};

/// Samples one stationary trajectory per seed, maps it through the lumping,
/// and evaluates the preimage count at every checkpoint not exceeding
/// `length`. Seeds run concurrently; results are folded in seed order.
GrowthStats empirical_growth(const MarkovChain& chain, const Lumping& lumping, std::size_t length,
                             std::vector<std::uint64_t> seeds,
                             const std::vector<std::size_t>& checkpoints = kDefaultCheckpoints);

struct OccurrenceCheck {
    // mean over seeds of |non-overlapping occurrences| / length
    double empirical_rate = 0.0;
    double stderr_ = 0.0;
    // P(pattern | first state) mu(first state) / |pattern|
    double bound = 0.0;
    // empirical_rate >= bound - 3 stderr
    bool pass = false;
    std::vector<double> per_seed;
};

/// Statistical proxy for the almost-sure linear growth of non-overlapping
/// occurrences. Throws UnrealisablePattern.
OccurrenceCheck occurrence_rate_check(const MarkovChain& chain, const StateWord& pattern, std::size_t length,
                                      std::vector<std::uint64_t> seeds);

} // namespace lumpkit

#endif
