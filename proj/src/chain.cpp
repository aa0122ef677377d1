#include "lumpkit/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <numeric>
#include <sstream>

namespace lumpkit {

struct MarkovChain::Cache {
    std::once_flag once;
    std::optional<StationaryDistribution> stationary;
};

namespace {

std::vector<bool> reachable_from(std::size_t root, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> seen(adj.size(), false);
    std::deque<std::size_t> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (auto v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

void validate_distribution(const Eigen::VectorXd& v, std::size_t n, ErrorCode code,
                           const char* what) {
    if (static_cast<std::size_t>(v.size()) != n) {
        std::ostringstream msg;
        msg << what << " has " << v.size() << " entries, expected " << n;
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
            std::ostringstream msg;
            msg << what << "[" << i << "] = " << v[i] << " is not a probability";
            throw Error(code, msg.str());
        }
    }
    if (std::abs(v.sum() - 1.0) > kRowSumTolerance) {
        std::ostringstream msg;
        msg << what << " sums to " << v.sum();
        throw Error(code, msg.str());
    }
}

double balance_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& mu) {
    Eigen::VectorXd next = P.transpose() * mu;
    return (next - mu).cwiseAbs().maxCoeff();
}

} // namespace

std::size_t TransitionGraph::edge_count() const {
    std::size_t count = 0;
    for (const auto& row : adjacency) {
        count += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
    }
    return count;
}

MarkovChain::MarkovChain(Eigen::MatrixXd transition, std::vector<std::string> labels,
                         std::optional<Eigen::VectorXd> initial, ChainOptions options)
    : transition_(std::move(transition)), labels_(std::move(labels)),
      initial_(std::move(initial)), options_(options), cache_(std::make_shared<Cache>()) {
    const auto rows = transition_.rows();
    if (rows == 0 || rows != transition_.cols()) {
        std::ostringstream msg;
        msg << "transition matrix is " << rows << "x" << transition_.cols()
            << ", expected a non-empty square matrix";
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    const auto n = static_cast<std::size_t>(rows);
    if (labels_.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            labels_.push_back(std::to_string(i + 1));
        }
    }
    if (labels_.size() != n) {
        std::ostringstream msg;
        msg << labels_.size() << " state labels for a " << n << "x" << n << " matrix";
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (labels_[i] == labels_[j]) {
                throw Error(ErrorCode::DimensionMismatch, "duplicate state label '" + labels_[i] + "'");
            }
        }
    }

    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < rows; ++j) {
            double p = transition_(i, j);
            if (!std::isfinite(p) || p < 0.0) {
                std::ostringstream msg;
                msg << "P(" << labels_[i] << ", " << labels_[j] << ") = " << p;
                throw Error(ErrorCode::NegativeEntry, msg.str());
            }
            if (p > 1.0 + kRowSumTolerance) {
                std::ostringstream msg;
                msg << "P(" << labels_[i] << ", " << labels_[j] << ") = " << p << " exceeds 1";
                throw Error(ErrorCode::NonStochasticRow, msg.str());
            }
        }
        double sum = transition_.row(i).sum();
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "row " << labels_[i] << " sums to " << sum;
            throw Error(ErrorCode::NonStochasticRow, msg.str());
        }
        if (!options_.exact_zero) {
            for (Eigen::Index j = 0; j < rows; ++j) {
                if (transition_(i, j) <= kPositivityThreshold) {
                    transition_(i, j) = 0.0;
                }
            }
        }
        transition_.row(i) /= transition_.row(i).sum();
    }

    if (initial_) {
        validate_distribution(*initial_, n, ErrorCode::NotADistribution, "initial distribution");
        *initial_ /= initial_->sum();
    }

    successors_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (has_edge(i, j)) {
                successors_[i].push_back(j);
            }
        }
    }
}

std::optional<std::size_t> MarkovChain::find_state(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t MarkovChain::index_of(std::string_view label) const {
    if (auto idx = find_state(label)) {
        return *idx;
    }
    throw Error(ErrorCode::UnknownState, "no state labelled '" + std::string(label) + "'");
}

TransitionGraph MarkovChain::graph() const {
    TransitionGraph g;
    g.adjacency.assign(size(), std::vector<bool>(size(), false));
    for (std::size_t i = 0; i < size(); ++i) {
        for (auto j : successors_[i]) {
            g.adjacency[i][j] = true;
        }
    }
    return g;
}

const StationaryDistribution& MarkovChain::stationary() const {
    std::call_once(cache_->once, [this] { cache_->stationary = stationary_distribution(*this); });
    return *cache_->stationary;
}

MarkovChain build_chain(const std::vector<std::vector<double>>& matrix,
                        std::vector<std::string> states,
                        std::optional<std::vector<double>> initial, ChainOptions options) {
    const auto n = static_cast<Eigen::Index>(matrix.size());
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = matrix[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != n) {
            std::ostringstream msg;
            msg << "row " << i << " has " << row.size() << " entries, expected " << n;
            throw Error(ErrorCode::DimensionMismatch, msg.str());
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            P(i, j) = row[static_cast<std::size_t>(j)];
        }
    }
    std::optional<Eigen::VectorXd> init;
    if (initial) {
        init = Eigen::Map<const Eigen::VectorXd>(initial->data(),
                                                 static_cast<Eigen::Index>(initial->size()));
    }
    return MarkovChain(std::move(P), std::move(states), std::move(init), options);
}

PeriodicityReport check_irreducible_aperiodic(const MarkovChain& chain) {
    const auto n = chain.size();
    const auto& forward = chain.successors();
    std::vector<std::vector<std::size_t>> backward(n);
    for (std::size_t u = 0; u < n; ++u) {
        for (auto v : forward[u]) {
            backward[v].push_back(u);
        }
    }
    auto from_root = reachable_from(0, forward);
    auto to_root = reachable_from(0, backward);

    PeriodicityReport report;
    report.irreducible = true;
    std::vector<bool> in_component(n);
    for (std::size_t i = 0; i < n; ++i) {
        in_component[i] = from_root[i] && to_root[i];
        report.irreducible = report.irreducible && in_component[i];
    }

    // BFS levels inside the strongly connected component of state 0; every
    // edge u -> v closes cycles whose lengths differ by level[u] + 1 - level[v].
    std::vector<long> level(n, -1);
    std::deque<std::size_t> queue{0};
    level[0] = 0;
    long period = 0;
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (auto v : forward[u]) {
            if (!in_component[v]) {
                continue;
            }
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    report.period = static_cast<int>(period);
    report.aperiodic = period == 1;
    return report;
}

void require_ergodic(const MarkovChain& chain) {
    auto report = check_irreducible_aperiodic(chain);
    if (!report.irreducible) {
        throw Error(ErrorCode::NotIrreducible, "transition graph is not strongly connected");
    }
    if (!report.aperiodic && !chain.options().allow_periodic) {
        throw Error(ErrorCode::NotAperiodic,
                    "chain has period " + std::to_string(report.period));
    }
}

StationaryDistribution stationary_distribution(const MarkovChain& chain, double tol) {
    require_ergodic(chain);
    const auto n = static_cast<Eigen::Index>(chain.size());
    const Eigen::MatrixXd& P = chain.transition();

    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    Eigen::VectorXd mu = A.fullPivLu().solve(b);
    mu = mu.cwiseMax(0.0);
    mu /= mu.sum();

    if (balance_residual(P, mu) > tol) {
        // the lazy chain shares mu and converges even for periodic P
        Eigen::MatrixXd lazy = 0.5 * (P + Eigen::MatrixXd::Identity(n, n));
        Eigen::VectorXd current = mu.allFinite() ? mu : Eigen::VectorXd::Constant(n, 1.0 / n);
        constexpr int kBudget = 1000000;
        int it = 0;
        for (; it < kBudget && balance_residual(P, current) > tol; ++it) {
            current = lazy.transpose() * current;
            current /= current.sum();
        }
        if (it == kBudget) {
            throw Error(ErrorCode::NoConvergence, "power iteration did not reach the tolerance");
        }
        mu = current;
    }
    return StationaryDistribution{std::move(mu)};
}

MarkovChain reverse_chain(const MarkovChain& chain) {
    const auto& mu = chain.stationary();
    const auto n = static_cast<Eigen::Index>(chain.size());
    Eigen::MatrixXd reversed(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            reversed(i, j) = mu.probs[j] * chain.transition()(j, i) / mu.probs[i];
        }
    }
    // the edge set is the transpose of the forward one; keep it exact
    ChainOptions options = chain.options();
    options.exact_zero = true;
    return MarkovChain(std::move(reversed), chain.labels(), std::nullopt, options);
}

KTransitionChain k_transition_chain(const MarkovChain& chain, int k,
                                    const EnumerationLimits& limits) {
    if (k < 1) {
        throw Error(ErrorCode::PreconditionViolated, "k must be at least 1");
    }
    if (saturating_pow(chain.size(), k) > limits.max_states) {
        std::ostringstream msg;
        msg << chain.size() << "^" << k << " lifted states exceed the cap of " << limits.max_states;
        throw Error(ErrorCode::StateSpaceTooLarge, msg.str());
    }
    const auto& mu = chain.stationary();

    std::vector<StateWord> words;
    std::vector<double> masses;
    StateWord word;
    auto extend = [&](auto&& self, double mass) -> void {
        if (static_cast<int>(word.size()) == k) {
            words.push_back(word);
            masses.push_back(mass);
            return;
        }
        for (auto next : chain.successors()[word.back()]) {
            word.push_back(next);
            self(self, mass * chain.prob(word[word.size() - 2], next));
            word.pop_back();
        }
    };
    for (std::size_t x = 0; x < chain.size(); ++x) {
        word.assign(1, x);
        extend(extend, mu[x]);
    }

    if (k == 1) {
        Eigen::VectorXd mass = Eigen::Map<Eigen::VectorXd>(masses.data(), static_cast<Eigen::Index>(masses.size()));
        return KTransitionChain{chain, std::move(words), std::move(mass)};
    }

    const auto m = static_cast<Eigen::Index>(words.size());
    // index lifted states by their length-(k-1) prefix for the shift relation
    std::vector<std::string> labels;
    labels.reserve(words.size());
    for (const auto& w : words) {
        std::string label = "(";
        for (std::size_t i = 0; i < w.size(); ++i) {
            label += (i ? "," : "") + chain.label(w[i]);
        }
        labels.push_back(label + ")");
    }
    Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const auto& from = words[static_cast<std::size_t>(a)];
        StateWord tail(from.begin() + 1, from.end());
        auto lo = std::lower_bound(words.begin(), words.end(), tail);
        for (auto it = lo; it != words.end() && std::equal(tail.begin(), tail.end(), it->begin()); ++it) {
            lifted(a, it - words.begin()) = chain.prob(from.back(), it->back());
        }
    }
    ChainOptions options = chain.options();
    options.exact_zero = true;
    Eigen::VectorXd mass = Eigen::Map<Eigen::VectorXd>(masses.data(), m);
    return KTransitionChain{MarkovChain(std::move(lifted), std::move(labels), std::nullopt, options),
                            std::move(words), std::move(mass)};
}

double path_probability(const MarkovChain& chain, std::span<const std::size_t> path,
                        const std::optional<Eigen::VectorXd>& start) {
    if (path.empty()) {
        throw Error(ErrorCode::PreconditionViolated, "path must be non-empty");
    }
    for (auto s : path) {
        if (s >= chain.size()) {
            throw Error(ErrorCode::UnknownState, "state index " + std::to_string(s) + " out of range");
        }
    }
    double p = 0.0;
    if (start) {
        if (static_cast<std::size_t>(start->size()) != chain.size()) {
            throw Error(ErrorCode::DimensionMismatch, "start distribution has wrong length");
        }
        p = (*start)[static_cast<Eigen::Index>(path[0])];
    } else if (chain.initial()) {
        p = (*chain.initial())[static_cast<Eigen::Index>(path[0])];
    } else {
        p = chain.stationary()[path[0]];
    }
    for (std::size_t i = 1; i < path.size() && p > 0.0; ++i) {
        p *= chain.prob(path[i - 1], path[i]);
    }
    return p;
}

double path_probability(const MarkovChain& chain, const std::vector<std::string>& path,
                        const std::optional<Eigen::VectorXd>& start) {
    StateWord indices;
    indices.reserve(path.size());
    for (const auto& label : path) {
        indices.push_back(chain.index_of(label));
    }
    return path_probability(chain, indices, start);
}

} // namespace lumpkit
