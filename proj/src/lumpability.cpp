#include "lumpkit/lumpability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "forward.hpp"

namespace lumpkit {

using detail::Alpha;

namespace {

// candidate enumeration for the loss bound stops after this many paths
constexpr std::size_t kWitnessPathBudget = 200000;

void require_order(int k) {
    if (k < 1) {
        throw Error(ErrorCode::KTooSmall, "lumpability order must be at least 1, got " + std::to_string(k));
    }
}

Eigen::VectorXd next_law(const MarkovChain& chain, const Lumping& lumping, const Alpha& alpha) {
    Eigen::VectorXd mass = detail::next_block_mass(alpha * chain.transition(), lumping);
    return mass / mass.sum();
}

// first coordinate where the two laws differ by more than tol
std::optional<std::size_t> first_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    for (Eigen::Index y = 0; y < a.size(); ++y) {
        if (std::abs(a[y] - b[y]) > tol) {
            return static_cast<std::size_t>(y);
        }
    }
    return std::nullopt;
}

struct AmbiguousSet {
    std::size_t check_state = 0;
    std::size_t hat_state = 0;
    BlockWord word;
    std::vector<std::pair<StateWord, double>> paths;
};

std::optional<LossBound> evaluate(const AmbiguousSet& set, std::size_t kappa, const Lumping& lumping) {
    if (set.paths.size() < 2) {
        return std::nullopt;
    }
    Eigen::VectorXd mass(static_cast<Eigen::Index>(set.paths.size()));
    for (std::size_t i = 0; i < set.paths.size(); ++i) {
        mass[static_cast<Eigen::Index>(i)] = set.paths[i].second;
    }
    std::vector<std::size_t> order(set.paths.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return set.paths[a].second > set.paths[b].second; });

    LossBound bound;
    bound.witness.kappa = kappa;
    bound.witness.check_state = set.check_state;
    bound.witness.hat_state = set.hat_state;
    bound.witness.path_a = set.paths[order[0]].first;
    bound.witness.path_b = set.paths[order[1]].first;
    bound.witness.lumped_word = lumping.image(bound.witness.path_a);
    bound.loss_entropy = detail::normalised_entropy(mass);
    bound.alpha = set.paths[order[0]].second / (2.0 * static_cast<double>(kappa + 2));
    bound.rate_lower_bound = bound.alpha * bound.loss_entropy;
    bound.growth_constant = std::exp2(bound.alpha);
    bound.ambiguous_paths = set.paths.size();
    return bound;
}

} // namespace

LumpabilityVerdict check_strong_lumpable(const MarkovChain& chain, const Lumping& lumping, int k, double tol,
                                         const EnumerationLimits& limits) {
    require_compatible(chain, lumping);
    require_order(k);
    check_horizon(lumping.num_blocks(), k, limits);
    const auto length = static_cast<std::size_t>(k);

    // p(Y_k | Y_[0,k-1]) keyed by the full word
    std::map<BlockWord, Eigen::VectorXd> coarse;
    detail::walk_stationary_words(chain, lumping, k - 1, [&](const BlockWord& word, const Alpha& alpha) {
        if (word.size() == length) {
            coarse.emplace(word, next_law(chain, lumping, alpha));
        }
    });

    LumpabilityVerdict verdict;
    verdict.order_k = k;
    verdict.strong = true;

    auto compare = [&](std::size_t x, const BlockWord& tail, const Alpha& alpha) {
        if (verdict.witness) {
            return;
        }
        BlockWord key{lumping.block_of(x)};
        key.insert(key.end(), tail.begin(), tail.end());
        auto it = coarse.find(key);
        if (it == coarse.end()) {
            return;
        }
        const Eigen::VectorXd fine = next_law(chain, lumping, alpha);
        if (auto y = first_difference(fine, it->second, tol)) {
            verdict.strong = false;
            verdict.witness = LumpabilityWitness{tail, x, *y, fine[static_cast<Eigen::Index>(*y)],
                                                 it->second[static_cast<Eigen::Index>(*y)]};
        }
    };

    for (std::size_t x = 0; x < chain.size() && !verdict.witness; ++x) {
        Alpha start = Alpha::Zero(static_cast<Eigen::Index>(chain.size()));
        start[static_cast<Eigen::Index>(x)] = 1.0;
        if (k == 1) {
            compare(x, {}, start);
            continue;
        }
        BlockWord word;
        detail::walk_lumped_words(chain, lumping, start, k - 1, word, [&](const BlockWord& w, const Alpha& alpha) {
            if (w.size() == length - 1) {
                compare(x, w, alpha);
            }
        });
    }

    const auto bounds = lumped_rate_bounds(chain, lumping, k, limits);
    verdict.entropy_given_state = bounds.lower;
    verdict.entropy_given_block = bounds.upper;
    const bool equal = std::abs(bounds.upper - bounds.lower) <= tol;
    verdict.entropy_agrees = equal == *verdict.strong;
    return verdict;
}

LumpabilityVerdict check_weak_lumpable(const MarkovChain& chain, const Lumping& lumping, int k, int horizon,
                                       double tol, const EnumerationLimits& limits) {
    require_compatible(chain, lumping);
    require_order(k);
    if (horizon < k) {
        std::ostringstream msg;
        msg << "horizon " << horizon << " is below the order " << k;
        throw Error(ErrorCode::PreconditionViolated, msg.str());
    }
    check_horizon(lumping.num_blocks(), horizon, limits);
    const auto order = static_cast<std::size_t>(k);

    std::map<BlockWord, Eigen::VectorXd> by_suffix;
    detail::walk_stationary_words(chain, lumping, k - 1, [&](const BlockWord& word, const Alpha& alpha) {
        if (word.size() == order) {
            by_suffix.emplace(word, next_law(chain, lumping, alpha));
        }
    });

    LumpabilityVerdict verdict;
    verdict.order_k = k;
    verdict.weak = WeakVerdict{true, horizon};
    verdict.conditional_entropies.assign(static_cast<std::size_t>(horizon), 0.0);

    detail::walk_stationary_words(chain, lumping, horizon - 1, [&](const BlockWord& word, const Alpha& alpha) {
        const Eigen::VectorXd mass = detail::next_block_mass(alpha * chain.transition(), lumping);
        verdict.conditional_entropies[word.size() - 1] += mass.sum() * detail::normalised_entropy(mass);
        if (word.size() <= order || verdict.witness) {
            return;
        }
        auto it = by_suffix.find(BlockWord(word.end() - k, word.end()));
        if (it == by_suffix.end()) {
            return;
        }
        const Eigen::VectorXd fine = mass / mass.sum();
        if (auto y = first_difference(fine, it->second, tol)) {
            verdict.weak->verdict = false;
            verdict.witness = LumpabilityWitness{word, std::nullopt, *y, fine[static_cast<Eigen::Index>(*y)],
                                                 it->second[static_cast<Eigen::Index>(*y)]};
        }
    });
    return verdict;
}

std::optional<LossBound> entropy_loss_bound(const MarkovChain& chain, const Lumping& lumping) {
    const auto index = split_merge_index(chain, lumping);
    if (!index.kappa) {
        return std::nullopt;
    }
    const auto kappa = *index.kappa;
    const auto& mu = chain.stationary().probs;
    const auto& succ = chain.successors();

    std::optional<LossBound> best;
    auto consider = [&](const AmbiguousSet& set) {
        auto bound = evaluate(set, kappa, lumping);
        if (bound && (!best || bound->rate_lower_bound > best->rate_lower_bound)) {
            best = std::move(bound);
        }
    };

    std::size_t visited = 0;
    bool exhausted = false;
    for (std::size_t check = 0; check < chain.size() && !exhausted; ++check) {
        std::map<std::pair<BlockWord, std::size_t>, std::vector<std::pair<StateWord, double>>> groups;
        StateWord path;
        auto extend = [&](auto&& self, std::size_t from, double mass) -> void {
            if (exhausted) {
                return;
            }
            if (path.size() == kappa) {
                for (auto hat : succ[from]) {
                    if (++visited > kWitnessPathBudget) {
                        exhausted = true;
                        return;
                    }
                    groups[{lumping.image(path), hat}].emplace_back(path, mass * chain.prob(from, hat));
                }
                return;
            }
            for (auto next : succ[from]) {
                path.push_back(next);
                self(self, next, mass * chain.prob(from, next));
                path.pop_back();
            }
        };
        extend(extend, check, mu[static_cast<Eigen::Index>(check)]);
        if (exhausted) {
            break;
        }
        for (auto& [key, paths] : groups) {
            consider(AmbiguousSet{check, key.second, key.first, std::move(paths)});
        }
    }

    if (exhausted) {
        // too many candidates: settle for the lexicographically first witness
        best.reset();
        const auto& w = *index.witness;
        AmbiguousSet set{w.check_state, w.hat_state, w.lumped_word, {}};
        for (auto& p : realisable_preimage(chain, lumping, w.lumped_word)) {
            if (chain.has_edge(w.check_state, p.front()) && chain.has_edge(p.back(), w.hat_state)) {
                double m = mu[static_cast<Eigen::Index>(w.check_state)] * chain.prob(w.check_state, p.front());
                for (std::size_t i = 1; i < p.size(); ++i) {
                    m *= chain.prob(p[i - 1], p[i]);
                }
                m *= chain.prob(p.back(), w.hat_state);
                set.paths.emplace_back(std::move(p), m);
            }
        }
        consider(set);
    }
    return best;
}

BlockEntropyCheck block_entropy_bound_check(const MarkovChain& chain, const Lumping& lumping, int n,
                                            const EnumerationLimits& limits) {
    require_compatible(chain, lumping);
    if (n < 1) {
        throw Error(ErrorCode::PreconditionViolated, "block length must be at least 1");
    }
    const auto index = split_merge_index(chain, lumping);
    if (index.kappa && n >= 2 && static_cast<std::size_t>(n - 2) >= *index.kappa) {
        std::ostringstream msg;
        msg << "the bound needs n - 2 < kappa; n = " << n << ", kappa = " << *index.kappa;
        throw Error(ErrorCode::PreconditionViolated, msg.str());
    }
    BlockEntropyCheck check;
    check.n = n;
    const double spread = static_cast<double>(chain.size() - lumping.num_blocks() + 1);
    check.bound = 2.0 * std::log2(spread);
    check.actual = block_entropy(chain, n) - lumped_block_entropy(chain, lumping, n, limits);
    check.satisfied = check.actual <= check.bound + 1e-10;
    return check;
}

} // namespace lumpkit
