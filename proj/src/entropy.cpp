#include "lumpkit/entropy.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "forward.hpp"
#include "lumpkit/random.hpp"

namespace lumpkit {

using detail::Alpha;

namespace {

void require_positive_horizon(int n) {
    if (n < 1) {
        throw Error(ErrorCode::PreconditionViolated, "horizon must be at least 1, got " + std::to_string(n));
    }
}

} // namespace

double shannon_entropy(std::span<const double> dist) {
    double total = 0.0;
    for (double p : dist) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::NotADistribution, "negative or non-finite probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kDistributionTolerance) {
        std::ostringstream msg;
        msg << "probabilities sum to " << total;
        throw Error(ErrorCode::NotADistribution, msg.str());
    }
    double h = 0.0;
    for (double p : dist) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

double shannon_entropy(const Eigen::VectorXd& dist) {
    return shannon_entropy(std::span<const double>(dist.data(), static_cast<std::size_t>(dist.size())));
}

double conditional_entropy(const Eigen::MatrixXd& joint) {
    if ((joint.array() < 0.0).any() || !joint.allFinite()) {
        throw Error(ErrorCode::NotADistribution, "joint has a negative or non-finite entry");
    }
    if (std::abs(joint.sum() - 1.0) > kDistributionTolerance) {
        std::ostringstream msg;
        msg << "joint sums to " << joint.sum();
        throw Error(ErrorCode::NotADistribution, msg.str());
    }
    double h = 0.0;
    for (Eigen::Index w = 0; w < joint.rows(); ++w) {
        const double mass = joint.row(w).sum();
        if (mass > kMassThreshold) {
            h += mass * detail::normalised_entropy(joint.row(w).transpose());
        }
    }
    return h;
}

Eigen::MatrixXd state_block_joint(const MarkovChain& chain, const Lumping& lumping) {
    require_compatible(chain, lumping);
    const auto& mu = chain.stationary().probs;
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(chain.size()),
                                                  static_cast<Eigen::Index>(lumping.num_blocks()));
    for (std::size_t x = 0; x < chain.size(); ++x) {
        for (std::size_t xp = 0; xp < chain.size(); ++xp) {
            joint(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(lumping.block_of(xp))) +=
                mu[static_cast<Eigen::Index>(x)] * chain.prob(x, xp);
        }
    }
    return joint;
}

double chain_entropy_rate(const MarkovChain& chain) {
    const auto& mu = chain.stationary().probs;
    double h = 0.0;
    for (std::size_t x = 0; x < chain.size(); ++x) {
        h += mu[static_cast<Eigen::Index>(x)] *
             detail::normalised_entropy(chain.transition().row(static_cast<Eigen::Index>(x)).transpose());
    }
    return h;
}

double block_entropy(const MarkovChain& chain, int n) {
    require_positive_horizon(n);
    return shannon_entropy(chain.stationary().probs) + (n - 1) * chain_entropy_rate(chain);
}

double lumped_block_entropy(const MarkovChain& chain, const Lumping& lumping, int n,
                            const EnumerationLimits& limits) {
    require_compatible(chain, lumping);
    require_positive_horizon(n);
    check_horizon(lumping.num_blocks(), n, limits);
    double h = 0.0;
    detail::walk_stationary_words(chain, lumping, n - 1, [&](const BlockWord& word, const Alpha& alpha) {
        if (word.size() == static_cast<std::size_t>(n)) {
            const double p = alpha.sum();
            h -= p * std::log2(p);
        }
    });
    return h;
}

EntropyBounds lumped_rate_bounds(const MarkovChain& chain, const Lumping& lumping, int n,
                                 const EnumerationLimits& limits) {
    require_compatible(chain, lumping);
    require_positive_horizon(n);
    check_horizon(lumping.num_blocks(), n, limits);
    const auto length = static_cast<std::size_t>(n);
    const auto& P = chain.transition();

    EntropyBounds bounds;
    bounds.horizon = n;

    auto accumulate = [&](double& into, const Alpha& alpha) {
        const Eigen::VectorXd next = detail::next_block_mass(alpha * P, lumping);
        into += next.sum() * detail::normalised_entropy(next);
    };

    detail::walk_stationary_words(chain, lumping, n - 1, [&](const BlockWord& word, const Alpha& alpha) {
        if (word.size() == length) {
            accumulate(bounds.upper, alpha);
        }
    });

    const auto& mu = chain.stationary().probs;
    for (std::size_t x0 = 0; x0 < chain.size(); ++x0) {
        Alpha start = Alpha::Zero(static_cast<Eigen::Index>(chain.size()));
        start[static_cast<Eigen::Index>(x0)] = mu[static_cast<Eigen::Index>(x0)];
        if (n == 1) {
            accumulate(bounds.lower, start);
            continue;
        }
        BlockWord word;
        detail::walk_lumped_words(chain, lumping, start, n - 1, word,
                                  [&](const BlockWord& w, const Alpha& alpha) {
                                      if (w.size() == length - 1) {
                                          accumulate(bounds.lower, alpha);
                                      }
                                  });
    }
    return bounds;
}

LossInterval conditional_entropy_rate_estimate(const MarkovChain& chain, const Lumping& lumping, int n,
                                               const EnumerationLimits& limits) {
    const auto bounds = lumped_rate_bounds(chain, lumping, n, limits);
    const double rate = chain_entropy_rate(chain);
    LossInterval interval;
    interval.horizon = n;
    interval.loss_lower = std::max(0.0, rate - bounds.upper);
    interval.loss_upper = std::max(0.0, rate - bounds.lower);
    return interval;
}

Eigen::VectorXd predict_blocks(const MarkovChain& chain, const Lumping& lumping, const BeliefState& belief) {
    const Alpha stepped = belief.weights.transpose() * chain.transition();
    return detail::next_block_mass(stepped, lumping);
}

BeliefState update_belief(const MarkovChain& chain, const Lumping& lumping, const BeliefState& belief,
                          std::size_t block) {
    const Alpha stepped = belief.weights.transpose() * chain.transition();
    Alpha next = detail::restrict_to_block(stepped, lumping, block);
    const double mass = next.sum();
    if (!(mass > 0.0)) {
        throw Error(ErrorCode::ZeroMassUpdate,
                    "observed block '" + lumping.block_label(block) + "' has zero predicted mass");
    }
    return BeliefState{(next / mass).transpose()};
}

BlackwellEstimate blackwell_entropy_estimate(const MarkovChain& chain, const Lumping& lumping,
                                             const BlackwellConfig& config) {
    require_compatible(chain, lumping);
    const std::uint64_t burn_in = config.burn_in.value_or(config.steps / 10);
    if (config.steps <= burn_in) {
        throw Error(ErrorCode::PreconditionViolated, "steps must exceed burn-in");
    }
    if (config.batches < 2 || config.steps - burn_in < config.batches) {
        throw Error(ErrorCode::PreconditionViolated, "need at least two batches of one step each");
    }

    Rng rng(config.seed);
    BeliefState belief{chain.stationary().probs};
    const std::uint64_t kept = config.steps - burn_in;
    std::vector<double> batch_sum(config.batches, 0.0);
    std::vector<std::uint64_t> batch_len(config.batches, 0);
    double total = 0.0;

    for (std::uint64_t t = 0; t < config.steps; ++t) {
        const Eigen::VectorXd r = predict_blocks(chain, lumping, belief);
        if (t >= burn_in) {
            const double h = detail::normalised_entropy(r);
            const auto i = t - burn_in;
            const auto batch = static_cast<std::size_t>(i * config.batches / kept);
            batch_sum[batch] += h;
            ++batch_len[batch];
            total += h;
        }
        const auto y = rng.categorical(r);
        belief = update_belief(chain, lumping, belief, y);
    }

    BlackwellEstimate result;
    result.estimate = total / static_cast<double>(kept);
    double var = 0.0;
    for (std::size_t b = 0; b < batch_sum.size(); ++b) {
        const double mean = batch_sum[b] / static_cast<double>(batch_len[b]);
        var += (mean - result.estimate) * (mean - result.estimate);
    }
    const auto batches = static_cast<double>(config.batches);
    var /= batches - 1.0;
    result.stderr_ = std::sqrt(var / batches);
    result.steps = config.steps;
    result.burn_in = burn_in;
    result.seed = config.seed;
    result.caveat = "assumes the belief process is ergodic with a unique stationary law; not verified";
    return result;
}

} // namespace lumpkit
