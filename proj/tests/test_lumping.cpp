#include <functional>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lumpkit/lumping.hpp"
#include "oracle.hpp"

using namespace lumpkit;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no lumpkit::Error thrown";
    return ErrorCode::ValidationError;
}

// every word over `blocks` symbols of length n, lexicographically
void for_each_word(std::size_t blocks, std::size_t n, const std::function<void(const BlockWord&)>& visit) {
    BlockWord w(n, 0);
    while (true) {
        visit(w);
        std::size_t i = n;
        while (i > 0 && ++w[i - 1] == blocks) {
            w[--i] = 0;
        }
        if (i == 0) {
            return;
        }
    }
}

StateWord states_of(const Model& m, std::initializer_list<const char*> labels) {
    StateWord w;
    for (auto l : labels) {
        w.push_back(m.chain.index_of(l));
    }
    return w;
}

} // namespace

TEST(Lumping, Construction) {
    auto model = fixtures::load("strong2notSFS2");
    const auto& g = model.lumping;
    EXPECT_EQ(g.num_blocks(), 2u);
    EXPECT_EQ(g.block_label(0), "A");
    EXPECT_EQ(g.preimage(1), (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(g.pair_count(), 4u);
    EXPECT_FALSE(g.is_trivial());
    EXPECT_EQ(g.block_index("B"), 1u);
    EXPECT_EQ(code_of([&] { (void)g.block_index("Z"); }), ErrorCode::UnknownBlock);
}

TEST(Lumping, RejectsBadMaps) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    EXPECT_EQ(code_of([] { Lumping::from_blocks({0, 0, 0, 0}); }), ErrorCode::TrivialLumping);
    EXPECT_EQ(code_of([] { Lumping::from_blocks({0, 1, 2, 3}); }), ErrorCode::TrivialLumping);
    EXPECT_EQ(code_of([] { Lumping::from_blocks({0, 2, 2, 0}); }), ErrorCode::NotSurjective);
    EXPECT_EQ(code_of([&] { Lumping::from_labels(chain, {{"1", "A"}, {"2", "B"}, {"3", "A"}}); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([&] { Lumping::from_labels(chain, {{"1", "A"}, {"2", "B"}, {"3", "A"}, {"9", "B"}}); }),
              ErrorCode::UnknownState);
    EXPECT_NO_THROW(Lumping::from_blocks({0, 0, 0, 0}, true));
    auto wrong_size = Lumping::from_blocks({0, 1, 0});
    EXPECT_EQ(code_of([&] { require_compatible(chain, wrong_size); }), ErrorCode::DimensionMismatch);
}

TEST(Preimage, RealisablePathsOfKemenyExample) {
    auto model = fixtures::load("boundsnotequal");
    const BlockWord word{0, 1, 1};
    auto paths = realisable_preimage(model.chain, model.lumping, word);
    EXPECT_EQ(paths.size(), preimage_count(model.chain, model.lumping, word));
    for (const auto& p : paths) {
        EXPECT_EQ(model.lumping.image(p), word);
        EXPECT_GT(path_probability(model.chain, p), 0.0);
    }
    EXPECT_TRUE(std::is_sorted(paths.begin(), paths.end()));
}

TEST(Preimage, EmptyAndUnrealisableWords) {
    auto model = fixtures::load("g_observable");
    EXPECT_EQ(preimage_count(model.chain, model.lumping, BlockWord{}), 1u);
    // A -> A is impossible: states 1 and 2 only lead out of A
    const auto a = model.lumping.block_index("A");
    EXPECT_EQ(preimage_count(model.chain, model.lumping, BlockWord{a, a}), 0u);
    EXPECT_TRUE(realisable_preimage(model.chain, model.lumping, BlockWord{a, a}).empty());
}

TEST(Preimage, CountsMatchEnumeration) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        const auto P = oracle::to_mat(model.chain);
        for (std::size_t n = 1; n <= 6; ++n) {
            auto expected = oracle::preimage_counts(P, model.lumping.blocks(), n);
            for_each_word(model.lumping.num_blocks(), n, [&](const BlockWord& w) {
                auto it = expected.find(w);
                const std::uint64_t want = it == expected.end() ? 0 : it->second;
                ASSERT_EQ(preimage_count(model.chain, model.lumping, w), want) << name << " n=" << n;
            });
        }
    }
}

TEST(Preimage, IdentityLumpingHasAtMostOnePath) {
    auto chain = fixtures::load("se_sx").chain;
    auto id = Lumping::identity(chain);
    for_each_word(chain.size(), 4, [&](const BlockWord& w) {
        EXPECT_EQ(preimage_count(chain, id, w), path_probability(chain, w) > 0.0 ? 1u : 0u);
    });
}

TEST(Preimage, TraceAgreesWithCounts) {
    auto model = fixtures::load("strong2notSFS2");
    BlockWord word;
    for (int i = 0; i < 40; ++i) {
        word.push_back(static_cast<std::size_t>(i % 3 == 0));
    }
    std::vector<std::size_t> checkpoints{1, 5, 10, 40};
    auto trace = preimage_count_trace(model.chain, model.lumping, word, checkpoints);
    ASSERT_EQ(trace.size(), checkpoints.size());
    for (const auto& point : trace) {
        auto count = preimage_count(model.chain, model.lumping, std::span(word).first(point.length));
        EXPECT_EQ(point.count, count);
        if (count > 0) {
            EXPECT_NEAR(point.log2_count, std::log2(static_cast<double>(count)), 1e-9);
        }
    }
}

TEST(Preimage, CountSaturates) {
    // fully connected pair of 2-state blocks: every word of length n has 2^n preimages
    auto chain = build_chain({{0.25, 0.25, 0.25, 0.25},
                              {0.25, 0.25, 0.25, 0.25},
                              {0.25, 0.25, 0.25, 0.25},
                              {0.25, 0.25, 0.25, 0.25}});
    auto g = Lumping::from_blocks({0, 0, 1, 1});
    BlockWord word(70, 0);
    EXPECT_EQ(preimage_count(chain, g, std::span(word).first(10)), 1024u);
    EXPECT_EQ(preimage_count(chain, g, word), UINT64_MAX);
    std::vector<std::size_t> checkpoints{70};
    auto trace = preimage_count_trace(chain, g, word, checkpoints);
    EXPECT_EQ(trace[0].count, UINT64_MAX);
    EXPECT_NEAR(trace[0].log2_count, 70.0, 1e-9);
}

TEST(Kappa, WitnessesOfRateLossExamples) {
    for (const auto* name : {"g_observable", "non_g_observable"}) {
        auto model = fixtures::load(name);
        auto result = split_merge_index(model.chain, model.lumping);
        ASSERT_TRUE(result.kappa) << name;
        EXPECT_EQ(*result.kappa, 1u);
        ASSERT_TRUE(result.witness);
        const auto& w = *result.witness;
        EXPECT_EQ(model.chain.label(w.check_state), "3");
        EXPECT_EQ(model.chain.label(w.hat_state), "3");
        EXPECT_EQ(w.path_a, states_of(model, {"1"}));
        EXPECT_EQ(w.path_b, states_of(model, {"2"}));
    }
}

TEST(Kappa, WitnessIsValid) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        auto result = split_merge_index(model.chain, model.lumping);
        EXPECT_EQ(result.depth_cap, model.lumping.pair_count());
        if (!result.kappa) {
            EXPECT_FALSE(result.witness) << name;
            continue;
        }
        ASSERT_TRUE(result.witness);
        const auto& w = *result.witness;
        EXPECT_LE(*result.kappa, result.depth_cap) << name;
        EXPECT_EQ(w.path_a.size(), *result.kappa);
        EXPECT_NE(w.path_a, w.path_b);
        EXPECT_EQ(model.lumping.image(w.path_a), model.lumping.image(w.path_b));
        EXPECT_EQ(model.lumping.image(w.path_a), w.lumped_word);
        for (const auto* path : {&w.path_a, &w.path_b}) {
            StateWord full{w.check_state};
            full.insert(full.end(), path->begin(), path->end());
            full.push_back(w.hat_state);
            EXPECT_GT(path_probability(model.chain, full), 0.0) << name;
        }
    }
}

TEST(Kappa, MatchesPathPairSearch) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        const auto P = oracle::to_mat(model.chain);
        auto result = split_merge_index(model.chain, model.lumping);
        EXPECT_EQ(result.kappa, oracle::kappa(P, model.lumping.blocks(), result.depth_cap)) << name;
    }
}

TEST(Kappa, PositiveMatrixGivesOne) {
    auto chain = build_chain({{0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1}, {0.25, 0.25, 0.25, 0.25}, {0.7, 0.1, 0.1, 0.1}});
    for (const auto& blocks : std::vector<std::vector<std::size_t>>{{0, 0, 1, 1}, {0, 1, 1, 1}, {0, 1, 2, 2}}) {
        auto result = split_merge_index(chain, Lumping::from_blocks(blocks));
        ASSERT_TRUE(result.kappa);
        EXPECT_EQ(*result.kappa, 1u);
    }
}

TEST(Kappa, InjectiveLumpingIsInfinite) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    auto result = split_merge_index(chain, Lumping::identity(chain));
    EXPECT_FALSE(result.kappa);
    EXPECT_EQ(result.depth_cap, 0u);
}

TEST(SingleEntry, Fixtures) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        auto result = check_single_entry(model.chain, model.lumping);
        EXPECT_EQ(result.holds, oracle::single_entry(oracle::to_mat(model.chain), model.lumping.blocks())) << name;
        if (!result.holds) {
            ASSERT_TRUE(result.violation);
            const auto& v = *result.violation;
            EXPECT_TRUE(model.chain.has_edge(v.state, v.first));
            EXPECT_TRUE(model.chain.has_edge(v.state, v.second));
            EXPECT_EQ(model.lumping.block_of(v.first), v.block);
            EXPECT_EQ(model.lumping.block_of(v.second), v.block);
            EXPECT_NE(v.first, v.second);
        }
    }
    EXPECT_TRUE(check_single_entry(fixtures::load("se_sx").chain, fixtures::load("se_sx").lumping).holds == false);
    EXPECT_TRUE(check_single_entry(fixtures::load("se_not_sfs").chain, fixtures::load("se_not_sfs").lumping).holds);
}

TEST(SingleEntry, ImpliesInfiniteKappa) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        if (check_single_entry(model.chain, model.lumping).holds) {
            EXPECT_FALSE(split_merge_index(model.chain, model.lumping).kappa) << name;
        }
    }
}

TEST(Sfs, MatchesEnumeration) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        const auto P = oracle::to_mat(model.chain);
        for (int k = 2; k <= 6; ++k) {
            EXPECT_EQ(check_sfs(model.chain, model.lumping, k).holds,
                      oracle::sfs(P, model.lumping.blocks(), static_cast<std::size_t>(k)))
                << name << " k=" << k;
        }
    }
}

TEST(Sfs, FigureVerdicts) {
    auto sfs2 = fixtures::load("sfs2_example");
    EXPECT_TRUE(check_sfs(sfs2.chain, sfs2.lumping, 2).holds);
    auto periodic = fixtures::load("sfs_not_strong");
    for (int k = 2; k <= 6; ++k) {
        EXPECT_FALSE(check_sfs(periodic.chain, periodic.lumping, k).holds) << k;
    }
    auto s2 = fixtures::load("strong2notSFS2");
    EXPECT_FALSE(check_sfs(s2.chain, s2.lumping, 2).holds);
}

TEST(Sfs, ViolationIsGenuine) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        auto result = check_sfs(model.chain, model.lumping, 3);
        if (result.holds) {
            continue;
        }
        ASSERT_TRUE(result.violation) << name;
        const auto& v = *result.violation;
        EXPECT_EQ(v.lumped_word.size(), 2u);
        EXPECT_NE(v.path_a, v.path_b);
        EXPECT_EQ(model.lumping.image(v.path_a), v.lumped_word);
        EXPECT_EQ(model.lumping.image(v.path_b), v.lumped_word);
        EXPECT_EQ(model.lumping.block_of(v.start_a), v.start_block);
        EXPECT_EQ(model.lumping.block_of(v.start_b), v.start_block);
        StateWord a{v.start_a}, b{v.start_b};
        a.insert(a.end(), v.path_a.begin(), v.path_a.end());
        b.insert(b.end(), v.path_b.begin(), v.path_b.end());
        EXPECT_GT(path_probability(model.chain, a), 0.0);
        EXPECT_GT(path_probability(model.chain, b), 0.0);
    }
}

TEST(Sfs, ImpliesSingleEntry) {
    for (const auto& name : fixtures::kAll) {
        auto model = fixtures::load(name);
        for (int k = 2; k <= 5; ++k) {
            if (check_sfs(model.chain, model.lumping, k).holds) {
                EXPECT_TRUE(check_single_entry(model.chain, model.lumping).holds) << name << " k=" << k;
            }
        }
    }
}

TEST(Sfs, RejectsSmallOrders) {
    auto model = fixtures::load("sfs2_example");
    EXPECT_EQ(code_of([&] { check_sfs(model.chain, model.lumping, 1); }), ErrorCode::KTooSmall);
    EXPECT_EQ(code_of([&] { check_sfs(model.chain, model.lumping, 20); }), ErrorCode::HorizonTooLarge);
}
