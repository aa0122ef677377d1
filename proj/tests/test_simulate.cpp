#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lumpkit/lumpability.hpp"
#include "lumpkit/random.hpp"
#include "lumpkit/simulate.hpp"

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

} // namespace

TEST(Rng, ReproducibleAndStreamed) {
    Rng a(5), b(5), c(5, 1), d(6);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
        EXPECT_NE(x, d.next());
    }
    Rng u(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Sample, LengthStartAndReproducibility) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    auto t = sample_trajectory(chain, 500, StationaryStart{}, 3);
    EXPECT_EQ(t.states.size(), 500u);
    EXPECT_EQ(t.seed, 3u);
    EXPECT_EQ(sample_trajectory(chain, 500, StationaryStart{}, 3).states, t.states);
    EXPECT_NE(sample_trajectory(chain, 500, StationaryStart{}, 4).states, t.states);
    EXPECT_GT(path_probability(chain, t.states), 0.0);

    auto delta = sample_trajectory(chain, 10, DeltaStart{2}, 9);
    EXPECT_EQ(delta.states.front(), 2u);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
    w[3] = 1.0;
    EXPECT_EQ(sample_trajectory(chain, 10, CustomStart{w}, 9).states.front(), 3u);
    EXPECT_EQ(code_of([&] { sample_trajectory(chain, 0, StationaryStart{}, 1); }), ErrorCode::PreconditionViolated);
}

TEST(Sample, RejectsBadStarts) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    EXPECT_EQ(code_of([&] { sample_trajectory(chain, 5, DeltaStart{7}, 0); }), ErrorCode::BadStartVector);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.5);
    EXPECT_EQ(code_of([&] { sample_trajectory(chain, 5, CustomStart{w}, 0); }), ErrorCode::BadStartVector);
    EXPECT_EQ(code_of([&] { sample_trajectory(chain, 5, CustomStart{Eigen::VectorXd::Ones(3)}, 0); }),
              ErrorCode::BadStartVector);
}

TEST(Sample, FrequenciesApproachStationaryLaw) {
    auto chain = fixtures::load("boundsnotequal").chain;
    const std::size_t n = 200000;
    auto t = sample_trajectory(chain, n, StationaryStart{}, 11);
    std::vector<double> freq(chain.size(), 0.0);
    for (auto x : t.states) {
        freq[x] += 1.0 / static_cast<double>(n);
    }
    for (std::size_t x = 0; x < chain.size(); ++x) {
        EXPECT_NEAR(freq[x], chain.stationary()[x], 0.01) << x;
    }
}

TEST(Sample, TransitionFrequencies) {
    auto chain = fixtures::load("g_observable").chain;
    auto t = sample_trajectory(chain, 200000, DeltaStart{0}, 5);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t i = 1; i < t.states.size(); ++i) {
        counts(static_cast<Eigen::Index>(t.states[i - 1]), static_cast<Eigen::Index>(t.states[i])) += 1.0;
    }
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double row = counts.row(i).sum();
        for (Eigen::Index j = 0; j < 4; ++j) {
            EXPECT_NEAR(counts(i, j) / row, chain.transition()(i, j), 0.015);
        }
    }
}

TEST(Traversal, OverlappingPattern) {
    const StateWord trajectory{0, 0, 0, 0};
    auto stats = traversal_stats(trajectory, StateWord{0, 0});
    EXPECT_EQ(stats.traversal, (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_EQ(stats.non_overlapping, (std::vector<std::size_t>{1, 3}));
    EXPECT_TRUE(stats.occupation.empty());
}

TEST(Traversal, SingleStateOccupation) {
    const StateWord trajectory{1, 0, 1, 1, 2};
    auto stats = traversal_stats(trajectory, StateWord{1});
    EXPECT_EQ(stats.occupation, (std::vector<std::size_t>{1, 3, 4}));
    EXPECT_EQ(stats.traversal, stats.occupation);
    EXPECT_EQ(stats.non_overlapping, stats.occupation);
}

TEST(Traversal, MixedPattern) {
    const StateWord trajectory{0, 1, 0, 1, 0, 1, 2};
    auto stats = traversal_stats(trajectory, StateWord{0, 1, 0});
    EXPECT_EQ(stats.traversal, (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(stats.non_overlapping, (std::vector<std::size_t>{1}));
    EXPECT_TRUE(traversal_stats(trajectory, StateWord{2, 0}).traversal.empty());
}

TEST(Traversal, Errors) {
    EXPECT_EQ(code_of([] { traversal_stats({0, 1}, {}); }), ErrorCode::EmptyPattern);
    EXPECT_EQ(code_of([] { traversal_stats({0, 1}, {0, 1, 0}); }), ErrorCode::PreconditionViolated);
}

TEST(Occurrence, PassesOnFixture) {
    auto chain = fixtures::load("strong2notSFS2").chain;
    const StateWord pattern{0, 1, 0};
    auto check = occurrence_rate_check(chain, pattern, 20000, {1, 2, 3, 4, 5});
    EXPECT_TRUE(check.pass);
    EXPECT_EQ(check.per_seed.size(), 5u);
    EXPECT_NEAR(check.bound, path_probability(chain, pattern) / 3.0, 1e-15);
    EXPECT_GE(check.empirical_rate, check.bound - 3 * check.stderr_);
}

TEST(Occurrence, RejectsUnrealisablePattern) {
    auto chain = fixtures::load("g_observable").chain;
    EXPECT_EQ(code_of([&] { occurrence_rate_check(chain, {0, 0}, 100, {1}); }), ErrorCode::UnrealisablePattern);
}

TEST(Growth, DeterministicAcrossRuns) {
    auto model = fixtures::load("strong2notSFS2");
    auto a = empirical_growth(model.chain, model.lumping, 500, {3, 1, 2});
    auto b = empirical_growth(model.chain, model.lumping, 500, {1, 2, 3});
    EXPECT_EQ(a.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
    ASSERT_EQ(a.points.size(), 4u); // 10, 50, 100, 500
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].counts, b.points[i].counts);
        EXPECT_EQ(a.points[i].counts.size(), 3u);
        EXPECT_DOUBLE_EQ(a.points[i].mean_rate, b.points[i].mean_rate);
        EXPECT_LE(a.points[i].min_rate, a.points[i].mean_rate + 1e-12);
    }
}

TEST(Growth, CountsMatchDirectEvaluation) {
    auto model = fixtures::load("sfs2_example");
    auto growth = empirical_growth(model.chain, model.lumping, 100, {7}, {10, 50, 100});
    auto t = sample_trajectory(model.chain, 100, StationaryStart{}, 7);
    auto word = model.lumping.image(t.states);
    for (const auto& point : growth.points) {
        EXPECT_EQ(point.counts[0], preimage_count(model.chain, model.lumping, std::span(word).first(point.n)));
        EXPECT_GE(point.counts[0], 1u);
    }
}

TEST(Growth, InfiniteKappaStaysBounded) {
    for (const auto* name : {"se_sx", "se_not_sfs", "lossless_not_weak"}) {
        auto model = fixtures::load(name);
        const auto spread = model.chain.size() - model.lumping.num_blocks() + 1;
        auto growth = empirical_growth(model.chain, model.lumping, 2000, {1, 2, 3, 4});
        for (const auto& point : growth.points) {
            EXPECT_LE(point.max_count, spread * spread) << name << " n=" << point.n;
        }
    }
}

TEST(Growth, FiniteKappaGrows) {
    auto model = fixtures::load("strong2notSFS2");
    auto bound = entropy_loss_bound(model.chain, model.lumping);
    ASSERT_TRUE(bound);
    auto growth = empirical_growth(model.chain, model.lumping, 2000, {1, 2, 3, 4});
    const auto& last = growth.points.back();
    EXPECT_EQ(last.n, 2000u);
    EXPECT_GE(last.min_rate, 1.0 + (bound->growth_constant - 1.0) / 2.0);
}
