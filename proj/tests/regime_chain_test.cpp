#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "rsinsure/errors.hpp"
#include "rsinsure/regime_chain.hpp"

using namespace rsinsure;

TEST(Generator, AcceptsTwoRegimeReferenceChain) {
    const GeneratorMatrix g = validate_generator({{-6.04, 6.04}, {6.4, -6.4}});
    EXPECT_EQ(g.size(), 2u);
    EXPECT_DOUBLE_EQ(g.rate(0, 1), 6.04);
    EXPECT_DOUBLE_EQ(g.exit_rate(1), 6.4);
    EXPECT_EQ(g, GeneratorMatrix::two_regime(6.04, 6.4));
}

TEST(Generator, AcceptsSingleRegime) {
    const GeneratorMatrix g = validate_generator({{0.0}});
    EXPECT_EQ(g.size(), 1u);
    EXPECT_TRUE(g.irreducible());
}

TEST(Generator, RowSumErrorNamesRow) {
    try {
        validate_generator({{-1.0, 0.5}, {1.0, -1.0}});
        FAIL() << "expected InvalidGenerator";
    } catch (const InvalidGenerator& e) {
        EXPECT_EQ(e.row(), 0u);
        EXPECT_EQ(e.exit_code(), 1);
    }
}

TEST(Generator, RejectsMalformedMatrices) {
    EXPECT_THROW(validate_generator({}), InvalidGenerator);
    EXPECT_THROW(validate_generator({{-1.0, 1.0}}), InvalidGenerator);
    EXPECT_THROW(validate_generator({{1.0, -1.0}, {1.0, -1.0}}), InvalidGenerator);  // negative off-diagonal
    EXPECT_THROW(validate_generator({{-1.0, 1.0}, {std::nan(""), 0.0}}), InvalidGenerator);
    try {
        validate_generator({{-1.0, 1.0}, {2.0, -1.0}});
        FAIL();
    } catch (const InvalidGenerator& e) {
        EXPECT_EQ(e.row(), 1u);
    }
}

TEST(Generator, Irreducibility) {
    EXPECT_TRUE(validate_generator({{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}}).irreducible());
    EXPECT_FALSE(validate_generator({{-1, 1}, {0, 0}}).irreducible());
}

TEST(RegimePath, SingleRegimeHasOneSegment) {
    const RegimePath p = sample_regime_path(validate_generator({{0.0}}), 0, 1e6, 7);
    ASSERT_EQ(p.segments.size(), 1u);
    EXPECT_EQ(p.segments[0].entry_time, 0.0);
    EXPECT_EQ(p.segments[0].regime, 0u);
    EXPECT_EQ(p.regime_at(5e5), 0u);
}

TEST(RegimePath, StructureAndDeterminism) {
    const GeneratorMatrix g = GeneratorMatrix::two_regime(6.04, 6.4);
    const RegimePath a = sample_regime_path(g, 1, 50.0, 11);
    const RegimePath b = sample_regime_path(g, 1, 50.0, 11);
    const RegimePath c = sample_regime_path(g, 1, 50.0, 12);
    ASSERT_EQ(a.segments.size(), b.segments.size());
    for (std::size_t k = 0; k < a.segments.size(); ++k) {
        EXPECT_EQ(a.segments[k].entry_time, b.segments[k].entry_time);
        EXPECT_EQ(a.segments[k].regime, b.segments[k].regime);
    }
    ASSERT_GT(a.segments.size(), 1u);
    ASSERT_GT(c.segments.size(), 1u);
    EXPECT_NE(a.segments[1].entry_time, c.segments[1].entry_time);
    EXPECT_EQ(a.segments.front().regime, 1u);
    for (std::size_t k = 1; k < a.segments.size(); ++k) {
        EXPECT_GT(a.segments[k].entry_time, a.segments[k - 1].entry_time);
        EXPECT_NE(a.segments[k].regime, a.segments[k - 1].regime);
        EXPECT_LT(a.segments[k].entry_time, 50.0);
    }
    const auto occ = a.occupancy(2);
    EXPECT_NEAR(occ[0] + occ[1], 50.0, 1e-9);
}

TEST(RegimePath, MeanHoldingTimeMatchesRate) {
    const GeneratorMatrix g = GeneratorMatrix::two_regime(6.0, 6.0);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::uint64_t path = 0; path < 100000; ++path) {
        const RegimePath p = sample_regime_path(g, 0, 100.0, 1000 + path);
        // first sojourn only: averaging all completed segments per path
        // is biased low by the censored final one
        ASSERT_GT(p.segments.size(), 1u);
        const double h = p.segment_end(0);
        sum += h;
        sq += h * h;
        ++n;
    }
    const double mean = sum / static_cast<double>(n);
    const double se = std::sqrt((sq / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
    EXPECT_NEAR(mean, 1.0 / 6.0, 3.0 * se);
}

TEST(RegimePath, OccupancyMatchesStationaryLaw) {
    const GeneratorMatrix g = GeneratorMatrix::two_regime(6.04, 6.4);
    const double horizon = 1000.0;
    double sum = 0.0, sq = 0.0;
    const int paths = 1000;
    for (int k = 0; k < paths; ++k) {
        const double f = sample_regime_path(g, 0, horizon, 77 + k).occupancy(2)[0] / horizon;
        sum += f;
        sq += f * f;
    }
    const double mean = sum / paths;
    const double se = std::sqrt((sq / paths - mean * mean) / paths);
    EXPECT_NEAR(mean, 6.4 / 12.44, 3.0 * se);
    EXPECT_NEAR(6.4 / 12.44, 0.5145, 1e-4);
}

TEST(Stationary, Examples) {
    auto p = stationary_distribution(GeneratorMatrix::two_regime(3.0, 3.0));
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
    p = stationary_distribution(GeneratorMatrix::two_regime(6.04, 6.4));
    EXPECT_NEAR(p[0], 6.4 / 12.44, 1e-15);
    EXPECT_NEAR(p[1], 6.04 / 12.44, 1e-15);
    p = stationary_distribution(validate_generator({{0.0}}));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], 1.0);
}

TEST(Stationary, MatchesUniformizedPowerIteration) {
    const std::vector<std::vector<double>> Q{{-3.0, 2.0, 1.0}, {0.5, -1.5, 1.0}, {4.0, 0.25, -4.25}};
    const auto p = stationary_distribution(validate_generator(Q));
    const auto ref = oracle::stationary_power_iteration(Q);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[i], ref[i], 1e-12);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-14);
}

TEST(Stationary, ReducibleChainIsSingular) {
    EXPECT_THROW(stationary_distribution(validate_generator({{-1, 1}, {0, 0}})), SingularChain);
}
