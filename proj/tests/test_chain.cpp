#include <functional>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lumpkit/chain.hpp"
#include "oracle.hpp"

using namespace lumpkit;

namespace {

MarkovChain two_state(double p, double q) { return build_chain({{1 - p, p}, {q, 1 - q}}); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no lumpkit::Error thrown";
    return ErrorCode::ValidationError;
}

} // namespace

TEST(BuildChain, AcceptsSymmetricPair) {
    auto chain = build_chain({{0.5, 0.5}, {0.5, 0.5}});
    EXPECT_EQ(chain.size(), 2u);
    EXPECT_EQ(chain.label(0), "1");
    EXPECT_EQ(chain.label(1), "2");
}

TEST(BuildChain, AcceptsRationalExample) {
    auto model = fixtures::load("boundsnotequal");
    EXPECT_EQ(model.chain.size(), 4u);
    EXPECT_DOUBLE_EQ(model.chain.prob(3, 1), 1.0 / 32);
}

TEST(BuildChain, RejectsBadInput) {
    EXPECT_EQ(code_of([] { build_chain({{0.5, 0.4}, {0.5, 0.5}}); }), ErrorCode::NonStochasticRow);
    EXPECT_EQ(code_of([] { build_chain({{-0.5, 1.5}, {0.5, 0.5}}); }), ErrorCode::NegativeEntry);
    EXPECT_EQ(code_of([] { build_chain({{1.0, 0.0}}); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { build_chain({{1.0, 0.0}, {0.0, 1.0}}, {"a"}); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { build_chain({{0.5, 0.5}, {0.5, 0.5}}, {"a", "a"}); }), ErrorCode::DimensionMismatch);
}

TEST(BuildChain, RowsSumToOne) {
    auto chain = build_chain({{0.3 + 1e-10, 0.7}, {0.2, 0.8}});
    for (Eigen::Index i = 0; i < 2; ++i) {
        EXPECT_NEAR(chain.transition().row(i).sum(), 1.0, 1e-12);
    }
}

TEST(BuildChain, TinyEntriesBecomeStructuralZeros) {
    auto loose = build_chain({{1 - 1e-16, 1e-16}, {0.5, 0.5}});
    EXPECT_FALSE(loose.has_edge(0, 1));
    ChainOptions exact;
    exact.exact_zero = true;
    auto strict = build_chain({{1 - 1e-16, 1e-16}, {0.5, 0.5}}, {}, std::nullopt, exact);
    EXPECT_TRUE(strict.has_edge(0, 1));
}

TEST(Stationary, DoublyStochasticIsUniform) {
    auto chain = build_chain({{0.2, 0.3, 0.5}, {0.5, 0.2, 0.3}, {0.3, 0.5, 0.2}});
    auto mu = stationary_distribution(chain);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(mu[i], 1.0 / 3, 1e-12);
    }
}

TEST(Stationary, TwoStateClosedForm) {
    const double p = 0.3, q = 0.1;
    auto mu = stationary_distribution(two_state(p, q));
    EXPECT_NEAR(mu[0], q / (p + q), 1e-12);
    EXPECT_NEAR(mu[1], p / (p + q), 1e-12);
}

TEST(Stationary, MatchesEliminationOnFixtures) {
    for (const auto& name : fixtures::kErgodic) {
        auto model = fixtures::load(name);
        auto expected = oracle::stationary(oracle::to_mat(model.chain));
        const auto& mu = model.chain.stationary();
        double sum = 0.0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            EXPECT_NEAR(mu[i], expected[i], 1e-12) << name;
            sum += mu[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        Eigen::VectorXd next = model.chain.transition().transpose() * mu.probs;
        EXPECT_LE((next - mu.probs).cwiseAbs().maxCoeff(), 1e-10) << name;
    }
}

TEST(Stationary, RejectsNonErgodic) {
    EXPECT_EQ(code_of([] { stationary_distribution(build_chain({{1, 0}, {0, 1}})); }), ErrorCode::NotIrreducible);
    EXPECT_EQ(code_of([] { stationary_distribution(build_chain({{0, 1}, {1, 0}})); }), ErrorCode::NotAperiodic);
}

TEST(Stationary, PeriodicAllowedOnRequest) {
    ChainOptions options;
    options.allow_periodic = true;
    auto chain = build_chain({{0, 1}, {1, 0}}, {}, std::nullopt, options);
    EXPECT_NEAR(chain.stationary()[0], 0.5, 1e-12);
}

TEST(Periodicity, Reports) {
    auto identity = check_irreducible_aperiodic(build_chain({{1, 0}, {0, 1}}));
    EXPECT_FALSE(identity.irreducible);
    auto cycle = check_irreducible_aperiodic(build_chain({{0, 1}, {1, 0}}));
    EXPECT_TRUE(cycle.irreducible);
    EXPECT_FALSE(cycle.aperiodic);
    EXPECT_EQ(cycle.period, 2);
    auto example = check_irreducible_aperiodic(fixtures::load("strong2notSFS2").chain);
    EXPECT_TRUE(example.irreducible);
    EXPECT_TRUE(example.aperiodic);
    EXPECT_EQ(example.period, 1);
    auto bipartite = check_irreducible_aperiodic(fixtures::load("sfs_not_strong").chain);
    EXPECT_TRUE(bipartite.irreducible);
    EXPECT_EQ(bipartite.period, 2);
}

TEST(Reverse, SymmetricChainIsItsOwnReversal) {
    auto chain = build_chain({{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}});
    auto rev = reverse_chain(chain);
    EXPECT_LE((rev.transition() - chain.transition()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Reverse, InvolutionPreservingStationaryLaw) {
    for (const auto& name : fixtures::kErgodic) {
        auto chain = fixtures::load(name).chain;
        auto rev = reverse_chain(chain);
        EXPECT_LE((rev.stationary().probs - chain.stationary().probs).cwiseAbs().maxCoeff(), 1e-12) << name;
        auto back = reverse_chain(rev);
        EXPECT_LE((back.transition() - chain.transition()).cwiseAbs().maxCoeff(), 1e-12) << name;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            for (std::size_t j = 0; j < chain.size(); ++j) {
                EXPECT_EQ(rev.has_edge(i, j), chain.has_edge(j, i));
            }
        }
    }
}

TEST(KTransition, IdentityLift) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    auto lift = k_transition_chain(chain, 1);
    EXPECT_EQ(lift.chain.size(), chain.size());
    EXPECT_LE((lift.chain.transition() - chain.transition()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(KTransition, PairMassesOnFullChain) {
    auto chain = two_state(0.3, 0.6);
    auto lift = k_transition_chain(chain, 2);
    ASSERT_EQ(lift.chain.size(), 4u);
    const auto& mu = chain.stationary();
    for (std::size_t w = 0; w < 4; ++w) {
        const auto& word = lift.words[w];
        EXPECT_NEAR(lift.word_mass[static_cast<Eigen::Index>(w)], mu[word[0]] * chain.prob(word[0], word[1]), 1e-14);
        EXPECT_NEAR(lift.chain.stationary()[w], lift.word_mass[static_cast<Eigen::Index>(w)], 1e-12);
    }
}

TEST(KTransition, MassesSumAndMarginalise) {
    for (int k : {2, 3}) {
        auto chain = fixtures::load("strong2notSFS2").chain;
        auto lift = k_transition_chain(chain, k);
        EXPECT_NEAR(lift.word_mass.sum(), 1.0, 1e-10);
        std::vector<double> marginal(chain.size(), 0.0);
        for (std::size_t w = 0; w < lift.words.size(); ++w) {
            marginal[lift.words[w][0]] += lift.word_mass[static_cast<Eigen::Index>(w)];
        }
        for (std::size_t x = 0; x < chain.size(); ++x) {
            EXPECT_NEAR(marginal[x], chain.stationary()[x], 1e-10);
        }
    }
}

TEST(KTransition, CapsStateSpace) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    EnumerationLimits tight;
    tight.max_states = 10;
    EXPECT_EQ(code_of([&] { k_transition_chain(chain, 2, tight); }), ErrorCode::StateSpaceTooLarge);
}

TEST(PathProbability, Basics) {
    auto chain = fixtures::load("g_observable").chain;
    const auto& mu = chain.stationary();
    StateWord single{2};
    EXPECT_NEAR(path_probability(chain, single), mu[2], 1e-15);
    EXPECT_GT(path_probability(chain, std::vector<std::string>{"3", "1", "3"}), 0.0);
    EXPECT_EQ(path_probability(chain, std::vector<std::string>{"1", "2"}), 0.0);
    StateWord bad{0, 9};
    EXPECT_EQ(code_of([&] { path_probability(chain, bad); }), ErrorCode::UnknownState);
    EXPECT_EQ(code_of([&] { path_probability(chain, std::vector<std::string>{"7"}); }), ErrorCode::UnknownState);
}

TEST(PathProbability, PositiveIffEdgesExist) {
    auto chain = fixtures::load("se_sx").chain;
    const auto mat = oracle::to_mat(chain);
    for (std::size_t a = 0; a < chain.size(); ++a) {
        for (std::size_t b = 0; b < chain.size(); ++b) {
            for (std::size_t c = 0; c < chain.size(); ++c) {
                StateWord w{a, b, c};
                bool edges = mat[a][b] > 0 && mat[b][c] > 0;
                EXPECT_EQ(path_probability(chain, w) > 0.0, edges);
            }
        }
    }
}
