#include "lumpkit/lumping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace lumpkit {

namespace {

constexpr std::uint64_t kSaturated = UINT64_MAX;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > kSaturated - b ? kSaturated : a + b;
}

void require_blocks(const Lumping& lumping, std::span<const std::size_t> word) {
    for (auto y : word) {
        if (y >= lumping.num_blocks()) {
            throw Error(ErrorCode::UnknownBlock, "block index " + std::to_string(y) + " out of range");
        }
    }
}

} // namespace

Lumping::Lumping(std::vector<std::size_t> block_of_state, std::vector<std::string> block_labels,
                 bool allow_trivial)
    : block_of_(std::move(block_of_state)), labels_(std::move(block_labels)) {
    preimage_.resize(labels_.size());
    for (std::size_t x = 0; x < block_of_.size(); ++x) {
        if (block_of_[x] >= labels_.size()) {
            std::ostringstream msg;
            msg << "state " << x << " maps to block " << block_of_[x] << " of " << labels_.size();
            throw Error(ErrorCode::UnknownBlock, msg.str());
        }
        preimage_[block_of_[x]].push_back(x);
    }
    for (std::size_t y = 0; y < labels_.size(); ++y) {
        if (preimage_[y].empty()) {
            throw Error(ErrorCode::NotSurjective, "block '" + labels_[y] + "' has an empty preimage");
        }
    }
    if (block_of_.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "lumping of an empty state space");
    }
    if (is_trivial() && !allow_trivial) {
        std::ostringstream msg;
        msg << "lumping onto " << num_blocks() << " blocks from " << num_states()
            << " states is trivial (need 2 <= |Y| < |X|); pass the override to allow it";
        throw Error(ErrorCode::TrivialLumping, msg.str());
    }
}

Lumping Lumping::from_labels(const MarkovChain& chain,
                             const std::map<std::string, std::string>& block_of_label,
                             bool allow_trivial) {
    for (const auto& [state, block] : block_of_label) {
        if (!chain.find_state(state)) {
            throw Error(ErrorCode::UnknownState, "lumping mentions unknown state '" + state + "'");
        }
    }
    std::vector<std::size_t> blocks;
    std::vector<std::string> labels;
    for (const auto& state : chain.labels()) {
        auto it = block_of_label.find(state);
        if (it == block_of_label.end()) {
            throw Error(ErrorCode::DimensionMismatch, "lumping has no block for state '" + state + "'");
        }
        auto pos = std::find(labels.begin(), labels.end(), it->second);
        if (pos == labels.end()) {
            labels.push_back(it->second);
            pos = labels.end() - 1;
        }
        blocks.push_back(static_cast<std::size_t>(pos - labels.begin()));
    }
    return Lumping(std::move(blocks), std::move(labels), allow_trivial);
}

Lumping Lumping::from_blocks(std::vector<std::size_t> block_of_state, bool allow_trivial) {
    std::size_t count = 0;
    for (auto b : block_of_state) {
        count = std::max(count, b + 1);
    }
    std::vector<std::string> labels;
    for (std::size_t b = 0; b < count; ++b) {
        labels.push_back("Y" + std::to_string(b + 1));
    }
    return Lumping(std::move(block_of_state), std::move(labels), allow_trivial);
}

Lumping Lumping::identity(const MarkovChain& chain) {
    std::vector<std::size_t> blocks(chain.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i] = i;
    }
    return Lumping(std::move(blocks), chain.labels(), true);
}

std::optional<std::size_t> Lumping::find_block(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Lumping::block_index(std::string_view label) const {
    if (auto b = find_block(label)) {
        return *b;
    }
    throw Error(ErrorCode::UnknownBlock, "no block labelled '" + std::string(label) + "'");
}

BlockWord Lumping::image(std::span<const std::size_t> states) const {
    BlockWord word;
    word.reserve(states.size());
    for (auto x : states) {
        word.push_back(block_of(x));
    }
    return word;
}

std::size_t Lumping::pair_count() const {
    std::size_t total = 0;
    for (const auto& pre : preimage_) {
        total += pre.size() * (pre.size() - 1);
    }
    return total;
}

void require_compatible(const MarkovChain& chain, const Lumping& lumping) {
    if (chain.size() != lumping.num_states()) {
        std::ostringstream msg;
        msg << "lumping covers " << lumping.num_states() << " states, chain has " << chain.size();
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
}

std::vector<StateWord> realisable_preimage(const MarkovChain& chain, const Lumping& lumping,
                                           std::span<const std::size_t> word,
                                           std::uint64_t max_candidates) {
    require_compatible(chain, lumping);
    require_blocks(lumping, word);
    std::uint64_t candidates = 1;
    for (auto y : word) {
        auto size = lumping.preimage(y).size();
        candidates = candidates > max_candidates / size ? max_candidates + 1 : candidates * size;
    }
    if (candidates > max_candidates) {
        throw Error(ErrorCode::HorizonTooLarge, "preimage enumeration exceeds the candidate cap");
    }

    std::vector<StateWord> result;
    if (word.empty()) {
        return result;
    }
    StateWord path;
    auto extend = [&](auto&& self) -> void {
        if (path.size() == word.size()) {
            result.push_back(path);
            return;
        }
        for (auto next : lumping.preimage(word[path.size()])) {
            if (path.empty() || chain.has_edge(path.back(), next)) {
                path.push_back(next);
                self(self);
                path.pop_back();
            }
        }
    };
    extend(extend);
    return result;
}

std::uint64_t preimage_count(const MarkovChain& chain, const Lumping& lumping,
                             std::span<const std::size_t> word) {
    require_compatible(chain, lumping);
    require_blocks(lumping, word);
    if (word.empty()) {
        return 1;
    }
    const auto n = chain.size();
    std::vector<std::uint64_t> count(n, 0), next(n, 0);
    for (auto x : lumping.preimage(word[0])) {
        count[x] = 1;
    }
    for (std::size_t i = 1; i < word.size(); ++i) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t x = 0; x < n; ++x) {
            if (count[x] == 0) {
                continue;
            }
            for (auto xp : chain.successors()[x]) {
                if (lumping.block_of(xp) == word[i]) {
                    next[xp] = sat_add(next[xp], count[x]);
                }
            }
        }
        count.swap(next);
    }
    std::uint64_t total = 0;
    for (auto c : count) {
        total = sat_add(total, c);
    }
    return total;
}

std::vector<PreimageCountPoint> preimage_count_trace(const MarkovChain& chain, const Lumping& lumping,
                                                     std::span<const std::size_t> word,
                                                     std::span<const std::size_t> checkpoints) {
    require_compatible(chain, lumping);
    require_blocks(lumping, word);
    std::vector<std::size_t> wanted(checkpoints.begin(), checkpoints.end());
    std::sort(wanted.begin(), wanted.end());
    std::vector<PreimageCountPoint> points;
    if (word.empty()) {
        return points;
    }

    const auto n = chain.size();
    std::vector<std::uint64_t> count(n, 0), next(n, 0);
    // scaled[x] * 2^offset is the count ending in x
    std::vector<double> scaled(n, 0.0), scaled_next(n, 0.0);
    double offset = 0.0;
    for (auto x : lumping.preimage(word[0])) {
        count[x] = 1;
        scaled[x] = 1.0;
    }
    auto it = wanted.begin();
    for (std::size_t len = 1; len <= word.size() && it != wanted.end(); ++len) {
        if (len > 1) {
            std::fill(next.begin(), next.end(), 0);
            std::fill(scaled_next.begin(), scaled_next.end(), 0.0);
            for (std::size_t x = 0; x < n; ++x) {
                if (count[x] == 0) {
                    continue;
                }
                for (auto xp : chain.successors()[x]) {
                    if (lumping.block_of(xp) == word[len - 1]) {
                        next[xp] = sat_add(next[xp], count[x]);
                        scaled_next[xp] += scaled[x];
                    }
                }
            }
            count.swap(next);
            scaled.swap(scaled_next);
            double top = *std::max_element(scaled.begin(), scaled.end());
            if (top > 0.0) {
                int exponent = 0;
                std::frexp(top, &exponent);
                for (auto& s : scaled) {
                    s = std::ldexp(s, -exponent);
                }
                offset += exponent;
            }
        }
        while (it != wanted.end() && *it < len) {
            ++it;
        }
        while (it != wanted.end() && *it == len) {
            PreimageCountPoint point;
            point.length = len;
            double sum = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                point.count = sat_add(point.count, count[x]);
                sum += scaled[x];
            }
            point.log2_count = sum > 0.0 ? offset + std::log2(sum) : -INFINITY;
            points.push_back(point);
            ++it;
        }
    }
    return points;
}

SplitMergeResult split_merge_index(const MarkovChain& chain, const Lumping& lumping) {
    require_compatible(chain, lumping);
    const auto n = chain.size();
    const auto& succ = chain.successors();
    auto id = [n](std::size_t u, std::size_t v) { return u * n + v; };
    auto same_block_pair = [&](std::size_t u, std::size_t v) {
        return u != v && lumping.block_of(u) == lumping.block_of(v);
    };

    SplitMergeResult result;
    result.depth_cap = lumping.pair_count();

    // pair successors, pairs listed in lexicographic order
    std::vector<std::vector<std::size_t>> pair_succ(n * n);
    std::vector<bool> is_pair(n * n, false), is_start(n * n, false), is_terminal(n * n, false);
    std::vector<std::size_t> pairs;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (!same_block_pair(u, v)) {
                continue;
            }
            const auto p = id(u, v);
            is_pair[p] = true;
            pairs.push_back(p);
            for (auto a : succ[u]) {
                for (auto b : succ[v]) {
                    if (same_block_pair(a, b)) {
                        pair_succ[p].push_back(id(a, b));
                    }
                }
            }
            std::sort(pair_succ[p].begin(), pair_succ[p].end());
            for (std::size_t x = 0; x < n && !is_start[p]; ++x) {
                is_start[p] = chain.has_edge(x, u) && chain.has_edge(x, v);
            }
            for (std::size_t x = 0; x < n && !is_terminal[p]; ++x) {
                is_terminal[p] = chain.has_edge(u, x) && chain.has_edge(v, x);
            }
        }
    }

    std::vector<bool> visited(n * n, false);
    std::vector<std::size_t> frontier;
    for (auto p : pairs) {
        if (is_start[p]) {
            frontier.push_back(p);
            visited[p] = true;
        }
    }
    std::size_t depth = 1;
    while (!frontier.empty()) {
        if (std::any_of(frontier.begin(), frontier.end(), [&](auto p) { return is_terminal[p]; })) {
            result.kappa = depth;
            break;
        }
        std::vector<std::size_t> next;
        for (auto p : frontier) {
            for (auto q : pair_succ[p]) {
                if (!visited[q]) {
                    visited[q] = true;
                    next.push_back(q);
                }
            }
        }
        frontier.swap(next);
        ++depth;
    }
    if (!result.kappa) {
        return result;
    }
    const auto kappa = *result.kappa;

    // finishes[j][p]: from pair p a terminal pair is reachable in exactly j steps
    std::vector<std::vector<bool>> finishes(kappa, std::vector<bool>(n * n, false));
    finishes[0] = is_terminal;
    for (std::size_t j = 1; j < kappa; ++j) {
        for (auto p : pairs) {
            finishes[j][p] = std::any_of(pair_succ[p].begin(), pair_succ[p].end(),
                                         [&](auto q) { return finishes[j - 1][q]; });
        }
    }

    SplitMergeWitness witness;
    witness.kappa = kappa;
    std::size_t current = 0;
    bool found = false;
    for (std::size_t x = 0; x < n && !found; ++x) {
        for (auto p : pairs) {
            auto u = p / n, v = p % n;
            if (u < v && chain.has_edge(x, u) && chain.has_edge(x, v) && finishes[kappa - 1][p]) {
                witness.check_state = x;
                current = p;
                found = true;
                break;
            }
        }
    }
    auto record = [&](std::size_t p) {
        witness.path_a.push_back(p / n);
        witness.path_b.push_back(p % n);
    };
    record(current);
    for (std::size_t i = 1; i < kappa; ++i) {
        for (auto q : pair_succ[current]) {
            if (finishes[kappa - 1 - i][q]) {
                current = q;
                break;
            }
        }
        record(current);
    }
    const auto last_a = witness.path_a.back(), last_b = witness.path_b.back();
    for (std::size_t x = 0; x < n; ++x) {
        if (chain.has_edge(last_a, x) && chain.has_edge(last_b, x)) {
            witness.hat_state = x;
            break;
        }
    }
    witness.lumped_word = lumping.image(witness.path_a);
    result.witness = std::move(witness);
    return result;
}

SingleEntryResult check_single_entry(const MarkovChain& chain, const Lumping& lumping) {
    require_compatible(chain, lumping);
    for (std::size_t x = 0; x < chain.size(); ++x) {
        std::vector<std::optional<std::size_t>> entered(lumping.num_blocks());
        for (auto xp : chain.successors()[x]) {
            auto& slot = entered[lumping.block_of(xp)];
            if (slot) {
                return {false, SingleEntryViolation{x, lumping.block_of(xp), *slot, xp}};
            }
            slot = xp;
        }
    }
    return {};
}

SfsResult check_sfs(const MarkovChain& chain, const Lumping& lumping, int k,
                    const EnumerationLimits& limits) {
    require_compatible(chain, lumping);
    if (k < 2) {
        throw Error(ErrorCode::KTooSmall, "the single forward k-sequence property needs k >= 2");
    }
    check_horizon(chain.size(), k, limits);
    const auto n = chain.size();
    const auto length = static_cast<std::size_t>(k - 1);

    SfsResult result;
    result.k = static_cast<std::size_t>(k);

    BlockWord word;
    // number of distinct realisable paths ending in each state, saturated at 2
    auto search = [&](auto&& self, const std::vector<int>& count) -> bool {
        if (word.size() == length) {
            int total = 0;
            for (auto c : count) {
                total += c;
            }
            return total >= 2;
        }
        for (std::size_t y = 0; y < lumping.num_blocks(); ++y) {
            std::vector<int> next(n, 0);
            bool any = false;
            for (std::size_t x = 0; x < n; ++x) {
                if (count[x] == 0) {
                    continue;
                }
                for (auto xp : chain.successors()[x]) {
                    if (lumping.block_of(xp) == y) {
                        next[xp] = std::min(2, next[xp] + count[x]);
                        any = true;
                    }
                }
            }
            if (!any) {
                continue;
            }
            word.push_back(y);
            if (self(self, next)) {
                return true;
            }
            word.pop_back();
        }
        return false;
    };

    for (std::size_t start = 0; start < lumping.num_blocks(); ++start) {
        // first step: distinct entry states, whichever state of the start block they come from
        for (std::size_t y = 0; y < lumping.num_blocks(); ++y) {
            std::vector<int> count(n, 0);
            bool any = false;
            for (auto x0 : lumping.preimage(start)) {
                for (auto xp : chain.successors()[x0]) {
                    if (lumping.block_of(xp) == y) {
                        count[xp] = 1;
                        any = true;
                    }
                }
            }
            if (!any) {
                continue;
            }
            word.assign(1, y);
            if (!search(search, count)) {
                continue;
            }
            // reconstruct two distinct paths for the report
            std::vector<std::pair<StateWord, std::size_t>> paths;
            StateWord path;
            auto collect = [&](auto&& rec) -> void {
                if (paths.size() >= 2) {
                    return;
                }
                if (path.size() == length) {
                    if (paths.empty() || paths.front().first != path) {
                        std::size_t from = 0;
                        for (auto x0 : lumping.preimage(start)) {
                            if (chain.has_edge(x0, path.front())) {
                                from = x0;
                                break;
                            }
                        }
                        paths.emplace_back(path, from);
                    }
                    return;
                }
                for (auto xp : lumping.preimage(word[path.size()])) {
                    bool ok = path.empty()
                                  ? std::any_of(lumping.preimage(start).begin(), lumping.preimage(start).end(),
                                                [&](auto x0) { return chain.has_edge(x0, xp); })
                                  : chain.has_edge(path.back(), xp);
                    if (ok) {
                        path.push_back(xp);
                        rec(rec);
                        path.pop_back();
                    }
                }
            };
            collect(collect);
            SfsViolation violation;
            violation.start_block = start;
            violation.lumped_word = word;
            violation.path_a = paths.at(0).first;
            violation.start_a = paths.at(0).second;
            violation.path_b = paths.at(1).first;
            violation.start_b = paths.at(1).second;
            result.holds = false;
            result.violation = std::move(violation);
            return result;
        }
    }
    return result;
}

} // namespace lumpkit
