#ifndef LUMPKIT_LUMPING_HPP
#define LUMPKIT_LUMPING_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lumpkit/chain.hpp"

namespace lumpkit {

using BlockWord = std::vector<std::size_t>;

/// Surjective map from states onto lumped states ("blocks").
///
/// Blocks are numbered densely; preimages are kept sorted by state index.
/// A non-trivial lumping has 2 <= |Y| < |X|; anything else requires
/// allow_trivial.
class Lumping {
public:
    Lumping(std::vector<std::size_t> block_of_state, std::vector<std::string> block_labels,
            bool allow_trivial = false);

    /// Blocks are numbered in order of first appearance along the state order.
    static Lumping from_labels(const MarkovChain& chain,
                               const std::map<std::string, std::string>& block_of_label,
                               bool allow_trivial = false);
    static Lumping from_blocks(std::vector<std::size_t> block_of_state, bool allow_trivial = false);
    // each state is its own block, labelled like the state; always trivial
    static Lumping identity(const MarkovChain& chain);

    std::size_t num_states() const { return block_of_.size(); }
    std::size_t num_blocks() const { return labels_.size(); }
    std::size_t block_of(std::size_t state) const { return block_of_.at(state); }
    const std::vector<std::size_t>& blocks() const { return block_of_; }
    const std::vector<std::size_t>& preimage(std::size_t block) const { return preimage_.at(block); }
    const std::vector<std::string>& block_labels() const { return labels_; }
    const std::string& block_label(std::size_t block) const { return labels_.at(block); }
    std::optional<std::size_t> find_block(std::string_view label) const;
    // throws UnknownBlock
    std::size_t block_index(std::string_view label) const;

    bool is_trivial() const { return num_blocks() < 2 || num_blocks() >= num_states(); }
    bool is_injective() const { return num_blocks() == num_states(); }

    BlockWord image(std::span<const std::size_t> states) const;

    // sum over blocks of |g^-1(y)| (|g^-1(y)| - 1): the split-merge depth cap
    std::size_t pair_count() const;

private:
    std::vector<std::size_t> block_of_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> preimage_;
};

// throws DimensionMismatch unless the lumping covers exactly the chain's states
void require_compatible(const MarkovChain& chain, const Lumping& lumping);

/// All realisable state words mapping onto `word`, in lexicographic order.
std::vector<StateWord> realisable_preimage(const MarkovChain& chain, const Lumping& lumping,
                                           std::span<const std::size_t> word,
                                           std::uint64_t max_candidates = 1u << 24);

/// |realisable_preimage(word)| by the counting recursion
///   c_{i+1}(x') = sum_x c_i(x) [P(x, x') > 0] [g(x') = y_{i+1}].
/// Saturates at UINT64_MAX.
std::uint64_t preimage_count(const MarkovChain& chain, const Lumping& lumping,
                             std::span<const std::size_t> word);

struct PreimageCountPoint {
    std::size_t length = 0;
    std::uint64_t count = 0; // saturating
    double log2_count = 0.0; // exact up to rounding, never saturates
};

/// Runs the counting recursion once along `word` and reports the count of
/// every prefix whose length is listed in `checkpoints`.
std::vector<PreimageCountPoint> preimage_count_trace(const MarkovChain& chain, const Lumping& lumping,
                                                     std::span<const std::size_t> word,
                                                     std::span<const std::size_t> checkpoints);

struct SplitMergeWitness {
    std::size_t kappa = 0;
    std::size_t check_state = 0;
    std::size_t hat_state = 0;
    BlockWord lumped_word;
    StateWord path_a;
    StateWord path_b;

    bool operator==(const SplitMergeWitness&) const = default;
};

struct SplitMergeResult {
    // nullopt means infinity
    std::optional<std::size_t> kappa;
    std::optional<SplitMergeWitness> witness;
    std::size_t depth_cap = 0;
};

/// Split-merge index by breadth-first search on the graph of ordered pairs
/// (u, v), u != v, g(u) = g(v). The reported witness is the smallest in the
/// order (check_state, (u_1, v_1), ..., (u_k, v_k), hat_state) with u_1 < v_1.
SplitMergeResult split_merge_index(const MarkovChain& chain, const Lumping& lumping);

struct SingleEntryViolation {
    std::size_t state = 0;
    std::size_t block = 0;
    std::size_t first = 0;
    std::size_t second = 0;
};

struct SingleEntryResult {
    bool holds = true;
    std::optional<SingleEntryViolation> violation;
};

SingleEntryResult check_single_entry(const MarkovChain& chain, const Lumping& lumping);

struct SfsViolation {
    std::size_t start_block = 0;
    BlockWord lumped_word;   // length k - 1
    std::size_t start_a = 0; // a predecessor of path_a in start_block
    std::size_t start_b = 0;
    StateWord path_a;
    StateWord path_b;
};

struct SfsResult {
    std::size_t k = 0;
    bool holds = true;
    std::optional<SfsViolation> violation;
};

/// Single forward k-sequence property: for every start block y and every
/// lumped word of length k-1 there is at most one realisable preimage path
/// entered from some state of y.
SfsResult check_sfs(const MarkovChain& chain, const Lumping& lumping, int k,
                    const EnumerationLimits& limits = {});

} // namespace lumpkit

#endif
