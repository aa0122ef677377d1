#include "lumpkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "lumpkit/random.hpp"

namespace lumpkit {

namespace {

Eigen::VectorXd start_weights(const MarkovChain& chain, const StartMode& start) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    if (std::holds_alternative<StationaryStart>(start)) {
        return chain.stationary().probs;
    }
    if (auto* delta = std::get_if<DeltaStart>(&start)) {
        if (delta->state >= chain.size()) {
            throw Error(ErrorCode::BadStartVector, "start state " + std::to_string(delta->state) + " out of range");
        }
        return Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(delta->state));
    }
    const auto& weights = std::get<CustomStart>(start).weights;
    if (weights.size() != n) {
        std::ostringstream msg;
        msg << "start vector has " << weights.size() << " entries, chain has " << n << " states";
        throw Error(ErrorCode::BadStartVector, msg.str());
    }
    if ((weights.array() < 0.0).any() || !weights.allFinite() || std::abs(weights.sum() - 1.0) > 1e-9) {
        throw Error(ErrorCode::BadStartVector, "start vector is not a probability distribution");
    }
    return weights;
}

} // namespace

Trajectory sample_trajectory(const MarkovChain& chain, std::size_t length, const StartMode& start,
                             std::uint64_t seed, std::uint64_t stream) {
    if (length < 1) {
        throw Error(ErrorCode::PreconditionViolated, "trajectory length must be at least 1");
    }
    const Eigen::VectorXd initial = start_weights(chain, start);

    // cumulative weights over each state's successors
    const auto& succ = chain.successors();
    std::vector<std::vector<double>> cumulative(chain.size());
    for (std::size_t x = 0; x < chain.size(); ++x) {
        double acc = 0.0;
        for (auto xp : succ[x]) {
            acc += chain.prob(x, xp);
            cumulative[x].push_back(acc);
        }
    }

    Rng rng(seed, stream);
    Trajectory traj;
    traj.seed = seed;
    traj.start_mode = start;
    traj.states.reserve(length);
    traj.states.push_back(rng.categorical(initial));
    while (traj.states.size() < length) {
        const auto x = traj.states.back();
        const auto& cum = cumulative[x];
        const double u = rng.uniform() * cum.back();
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        if (it == cum.end()) {
            --it;
        }
        traj.states.push_back(succ[x][static_cast<std::size_t>(it - cum.begin())]);
    }
    return traj;
}

TraversalStats traversal_stats(const StateWord& trajectory, const StateWord& pattern) {
    if (pattern.empty()) {
        throw Error(ErrorCode::EmptyPattern, "pattern must contain at least one state");
    }
    if (pattern.size() > trajectory.size()) {
        throw Error(ErrorCode::PreconditionViolated, "pattern is longer than the trajectory");
    }
    TraversalStats stats;
    stats.pattern = pattern;
    const auto k = pattern.size();
    std::size_t free_from = 0;
    for (std::size_t i = 0; i + k <= trajectory.size(); ++i) {
        if (!std::equal(pattern.begin(), pattern.end(), trajectory.begin() + static_cast<std::ptrdiff_t>(i))) {
            continue;
        }
        stats.traversal.push_back(i + 1);
        if (i >= free_from) {
            stats.non_overlapping.push_back(i + 1);
            free_from = i + k;
        }
    }
    if (k == 1) {
        stats.occupation = stats.traversal;
    }
    return stats;
}

GrowthStats empirical_growth(const MarkovChain& chain, const Lumping& lumping, std::size_t length,
                             std::vector<std::uint64_t> seeds, const std::vector<std::size_t>& checkpoints) {
    require_compatible(chain, lumping);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    std::vector<std::size_t> wanted;
    for (auto c : checkpoints) {
        if (c >= 1 && c <= length) {
            wanted.push_back(c);
        }
    }
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    chain.stationary(); // compute once before the workers share it
    std::vector<std::future<std::vector<PreimageCountPoint>>> jobs;
    for (auto seed : seeds) {
        jobs.push_back(std::async(std::launch::async, [&, seed] {
            const auto traj = sample_trajectory(chain, length, StationaryStart{}, seed);
            const auto word = lumping.image(traj.states);
            return preimage_count_trace(chain, lumping, word, wanted);
        }));
    }

    GrowthStats stats;
    stats.length = length;
    stats.seeds = seeds;
    for (auto n : wanted) {
        GrowthPoint point;
        point.n = n;
        stats.points.push_back(point);
    }
    for (auto& job : jobs) {
        const auto trace = job.get();
        for (std::size_t i = 0; i < trace.size(); ++i) {
            auto& point = stats.points[i];
            point.counts.push_back(trace[i].count);
            point.log2_counts.push_back(trace[i].log2_count);
        }
    }
    for (auto& point : stats.points) {
        if (point.counts.empty()) {
            continue;
        }
        point.max_count = *std::max_element(point.counts.begin(), point.counts.end());
        double sum = 0.0;
        double low = INFINITY;
        for (double l : point.log2_counts) {
            sum += l;
            low = std::min(low, l);
        }
        const auto n = static_cast<double>(point.n);
        point.mean_rate = std::exp2(sum / static_cast<double>(point.log2_counts.size()) / n);
        point.min_rate = std::exp2(low / n);
    }
    return stats;
}

OccurrenceCheck occurrence_rate_check(const MarkovChain& chain, const StateWord& pattern, std::size_t length,
                                      std::vector<std::uint64_t> seeds) {
    if (pattern.empty()) {
        throw Error(ErrorCode::EmptyPattern, "pattern must contain at least one state");
    }
    if (seeds.empty()) {
        throw Error(ErrorCode::PreconditionViolated, "at least one seed is required");
    }
    const auto start = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(chain.size()),
                                             static_cast<Eigen::Index>(pattern.front()))
                           .eval();
    const double p = path_probability(chain, pattern, start);
    if (!(p > 0.0)) {
        throw Error(ErrorCode::UnrealisablePattern, "pattern has zero probability");
    }
    std::sort(seeds.begin(), seeds.end());

    chain.stationary();
    std::vector<std::future<double>> jobs;
    for (auto seed : seeds) {
        jobs.push_back(std::async(std::launch::async, [&, seed] {
            const auto traj = sample_trajectory(chain, length, StationaryStart{}, seed);
            const auto stats = traversal_stats(traj.states, pattern);
            return static_cast<double>(stats.non_overlapping.size()) / static_cast<double>(length);
        }));
    }

    OccurrenceCheck check;
    for (auto& job : jobs) {
        check.per_seed.push_back(job.get());
    }
    const auto count = static_cast<double>(check.per_seed.size());
    for (double r : check.per_seed) {
        check.empirical_rate += r;
    }
    check.empirical_rate /= count;
    if (check.per_seed.size() > 1) {
        double var = 0.0;
        for (double r : check.per_seed) {
            var += (r - check.empirical_rate) * (r - check.empirical_rate);
        }
        check.stderr_ = std::sqrt(var / (count - 1.0) / count);
    }
    check.bound = p * chain.stationary()[pattern.front()] / static_cast<double>(pattern.size());
    check.pass = check.empirical_rate >= check.bound - 3.0 * check.stderr_;
    return check;
}

} // namespace lumpkit
