#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace cofuse;
using support::L;

TEST(Odds, KnownValues) {
    EXPECT_DOUBLE_EQ(odds(0.5).value(), 1.0);
    EXPECT_DOUBLE_EQ(odds(0.0).value(), 0.0);
    EXPECT_NEAR(odds(0.9).value(), 9.0, 1e-12);
    EXPECT_TRUE(odds(1.0).is_infinite());
    EXPECT_DOUBLE_EQ(odds(1.0).probability(), 1.0);
}

TEST(Odds, RejectsOutsideUnitInterval) {
    EXPECT_THROW(odds(-0.1), DomainError);
    EXPECT_THROW(odds(1.1), DomainError);
    EXPECT_THROW(odds(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(Odds, ProbabilityInvertsOdds) {
    for (double r = 0.0; r < 1.0; r += 0.01) EXPECT_NEAR(odds(r).probability(), r, 1e-12);
}

TEST(Odds, ClampKeepsExistenceBelowOne) {
    EXPECT_EQ(clamp_existence(1.0), kMaxExistence);
    EXPECT_EQ(clamp_existence(-1.0), 0.0);
    EXPECT_EQ(clamp_existence(0.3), 0.3);
}

TEST(LabelOrder, OlderBirthTimeFirst) {
    EXPECT_TRUE(L(3, 1, 2).older_than(L(5, 2, 1)));
    EXPECT_FALSE(L(5, 2, 1).older_than(L(3, 1, 2)));
}

TEST(LabelOrder, TieBrokenByNodeThenIndex) {
    EXPECT_TRUE(L(4, 1, 9).older_than(L(4, 2, 1)));
    EXPECT_TRUE(L(4, 2, 1).older_than(L(4, 2, 3)));
    EXPECT_FALSE(L(4, 2, 3).older_than(L(4, 2, 3)));
}

TEST(LabelOrder, StreamsAsTriple) {
    std::ostringstream os;
    os << L(3, 1, 2);
    EXPECT_EQ(os.str(), "(3,1,2)");
}

TEST(Seeds, DerivedStreamsDiffer) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, {a, b}));
    EXPECT_EQ(seen.size(), 400u);
    EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
    EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
    EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
}

TEST(ParticleSetTest, NormalizesAndComputesMean) {
    ParticleSet s({{{0, 0, 0, 0, 0}, 1.0}, {{2, 4, 0, 0, 0}, 3.0}});
    EXPECT_NEAR(s.weight_sum(), 1.0, 1e-15);
    EXPECT_NEAR(s.mean().px, 1.5, 1e-12);
    EXPECT_NEAR(s.mean().py, 3.0, 1e-12);
}

TEST(ParticleSetTest, RejectsBadWeights) {
    EXPECT_THROW(ParticleSet({{{}, -1.0}}), PreconditionError);
    EXPECT_THROW(ParticleSet({{{}, 0.0}, {{}, 0.0}}), PreconditionError);
    EXPECT_THROW(ParticleSet({{{}, std::numeric_limits<double>::infinity()}}), PreconditionError);
    EXPECT_THROW((void)ParticleSet{}.mean(), PreconditionError);
}

TEST(Resample, SystematicCountsMatchWeights) {
    Rng rng(3);
    std::vector<Particle> ps{{{0, 0, 0, 0, 0}, 0.25}, {{1, 0, 0, 0, 0}, 0.75}};
    const auto out = resample(ps, 1000, rng);
    ASSERT_EQ(out.size(), 1000u);
    const auto ones = std::count_if(out.particles().begin(), out.particles().end(),
                                    [](const Particle& p) { return p.state.px == 1.0; });
    // Systematic resampling is exact to within one copy.
    EXPECT_NEAR(static_cast<double>(ones), 750.0, 1.0);
    for (const auto& p : out.particles()) EXPECT_NEAR(p.weight, 1e-3, 1e-15);
}

TEST(Resample, NeverPicksZeroWeight) {
    Rng rng(5);
    std::vector<Particle> ps{{{9, 9, 0, 0, 0}, 0.0}, {{1, 0, 0, 0, 0}, 1.0}, {{8, 8, 0, 0, 0}, 0.0}};
    for (int rep = 0; rep < 50; ++rep) {
        const auto out = resample(ps, 17, rng);
        for (const auto& p : out.particles()) EXPECT_EQ(p.state.px, 1.0);
    }
}

TEST(Resample, RejectsDegenerateInput) {
    Rng rng(1);
    std::vector<Particle> zero{{{}, 0.0}};
    EXPECT_THROW(resample(zero, 10, rng), PreconditionError);
    std::vector<Particle> one{{{}, 1.0}};
    EXPECT_THROW(resample(one, 0, rng), PreconditionError);
}

TEST(Lmb, SortsByLabelAndRejectsDuplicates) {
    LmbDensity d(1, 1, {support::point_component(L(2, 1, 1), 0.5, 0, 0), support::point_component(L(1, 1, 1), 0.4, 0, 0)});
    EXPECT_EQ(d.components().front().label, L(1, 1, 1));
    EXPECT_NEAR(d.expected_cardinality(), 0.9, 1e-12);
    EXPECT_THROW(LmbDensity(1, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0),
                                   support::point_component(L(1, 1, 1), 0.4, 0, 0)}),
                 InternalError);
}

TEST(Lmb, RejectsExistenceOutsideUnitInterval) {
    EXPECT_ANY_THROW(LmbDensity(1, 1, {support::point_component(L(1, 1, 1), 1.5, 0, 0)}));
}

TEST(Lmb, ExtractionIsStrictlyAboveThreshold) {
    LmbDensity d(1, 1, {support::point_component(L(1, 1, 1), 0.9, 1, 2), support::point_component(L(1, 1, 2), 0.95, 3, 4)});
    const auto est = extract_estimates(d, 0.9);
    ASSERT_EQ(est.size(), 1u);
    EXPECT_EQ(est[0].label, L(1, 1, 2));
    EXPECT_DOUBLE_EQ(est[0].state.px, 3.0);
    EXPECT_THROW(extract_estimates(d, 1.0), DomainError);
    EXPECT_THROW(extract_estimates(d, 0.0), DomainError);
}

TEST(Lmb, PruneAndCap) {
    std::vector<BernoulliComponent> cs;
    for (std::uint32_t m = 1; m <= 10; ++m) cs.push_back(support::point_component(L(1, 1, m), 0.05 * m, 0, 0));
    const LmbDensity d(1, 1, cs);
    EXPECT_EQ(prune(d, 0.26).size(), 5u);
    const auto capped = cap_components(d, 3);
    ASSERT_EQ(capped.size(), 3u);
    for (const auto& c : capped.components()) EXPECT_GE(c.existence, 0.4 - 1e-12);
}
