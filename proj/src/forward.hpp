#ifndef LUMPKIT_SRC_FORWARD_HPP
#define LUMPKIT_SRC_FORWARD_HPP

// Forward pass over lumped words. alpha(x) is the joint mass of the word
// read so far and the current state x.

#include <cmath>

#include <Eigen/Dense>

#include "lumpkit/chain.hpp"
#include "lumpkit/entropy.hpp"
#include "lumpkit/lumping.hpp"

namespace lumpkit::detail {

using Alpha = Eigen::RowVectorXd;

inline Alpha restrict_to_block(const Alpha& alpha, const Lumping& lumping, std::size_t block) {
    Alpha out = Alpha::Zero(alpha.size());
    for (auto x : lumping.preimage(block)) {
        out[static_cast<Eigen::Index>(x)] = alpha[static_cast<Eigen::Index>(x)];
    }
    return out;
}

// mass of each next lumped symbol after alpha
inline Eigen::VectorXd next_block_mass(const Alpha& stepped, const Lumping& lumping) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lumping.num_blocks()));
    for (Eigen::Index x = 0; x < stepped.size(); ++x) {
        mass[static_cast<Eigen::Index>(lumping.block_of(static_cast<std::size_t>(x)))] += stepped[x];
    }
    return mass;
}

// entropy of a nonnegative vector after normalising by its sum
inline double normalised_entropy(const Eigen::VectorXd& mass) {
    const double total = mass.sum();
    double h = 0.0;
    for (Eigen::Index i = 0; i < mass.size(); ++i) {
        if (mass[i] > 0.0) {
            const double p = mass[i] / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

// Depth-first walk extending `word` by `steps` lumped symbols starting from
// alpha. visit(word, alpha) is called on every node below the root, in
// lexicographic order of words; branches lighter than kMassThreshold are cut.
template <class Visit>
void walk_lumped_words(const MarkovChain& chain, const Lumping& lumping, const Alpha& alpha, int steps,
                       BlockWord& word, Visit&& visit) {
    if (steps <= 0) {
        return;
    }
    const Alpha stepped = alpha * chain.transition();
    for (std::size_t y = 0; y < lumping.num_blocks(); ++y) {
        Alpha next = restrict_to_block(stepped, lumping, y);
        if (next.sum() <= kMassThreshold) {
            continue;
        }
        word.push_back(y);
        visit(static_cast<const BlockWord&>(word), static_cast<const Alpha&>(next));
        walk_lumped_words(chain, lumping, next, steps - 1, word, visit);
        word.pop_back();
    }
}

// Stationary mass restricted to each first symbol, then walked `steps` more.
// visit sees every word of length 1 .. steps + 1.
template <class Visit>
void walk_stationary_words(const MarkovChain& chain, const Lumping& lumping, int steps, Visit&& visit) {
    const Alpha mu = chain.stationary().probs.transpose();
    BlockWord word;
    for (std::size_t y = 0; y < lumping.num_blocks(); ++y) {
        Alpha start = restrict_to_block(mu, lumping, y);
        if (start.sum() <= kMassThreshold) {
            continue;
        }
        word.assign(1, y);
        visit(static_cast<const BlockWord&>(word), static_cast<const Alpha&>(start));
        walk_lumped_words(chain, lumping, start, steps, word, visit);
    }
}

} // namespace lumpkit::detail

#endif
