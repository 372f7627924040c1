#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "support.hpp"

using namespace cofuse;
using namespace cofuse::fusion;
using support::L;

namespace {

FusionConfig no_merge(std::size_t rounds) {
    FusionConfig cfg;
    cfg.consensus_iterations = rounds;
    cfg.merge = false;
    cfg.merged_particle_count = 50;
    return cfg;
}

double mean_px(const BernoulliComponent& c) { return eap_estimate(c).px; }

// Hop distances by breadth-first search, the oracle for label spread during consensus.
std::map<NodeId, std::size_t> hops_from(const net::NetworkGraph& g, NodeId src) {
    std::map<NodeId, std::size_t> dist{{src, 0}};
    std::vector<NodeId> frontier{src};
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId u : frontier)
            for (NodeId v : g.neighbors(u))
                if (!dist.contains(v)) {
                    dist[v] = dist[u] + 1;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    return dist;
}

} // namespace

TEST(FuseExistence, Examples) {
    EXPECT_NEAR(fuse_existence(std::vector<double>{0.7}), 0.7, 1e-12);
    EXPECT_NEAR(fuse_existence(std::vector<double>{0.5, 0.5}), 2.0 / 3.0, 1e-12);
    EXPECT_GE(fuse_existence(std::vector<double>{0.2, 0.99}), 0.99);
    EXPECT_LT(fuse_existence(std::vector<double>{1.0, 1.0}), 1.0);
    EXPECT_THROW(fuse_existence(std::vector<double>{}), PreconditionError);
    EXPECT_THROW(fuse_existence(std::vector<double>{1.5}), DomainError);
}

TEST(FuseExistence, DominatesEveryInputAndIsSymmetric) {
    Rng rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 6);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> rs(static_cast<std::size_t>(count(rng)));
        for (auto& r : rs) r = u(rng);
        const double f = fuse_existence(rs);
        EXPECT_GE(f, *std::max_element(rs.begin(), rs.end()));
        EXPECT_LE(f, 1.0);
        std::shuffle(rs.begin(), rs.end(), rng);
        EXPECT_NEAR(fuse_existence(rs), f, 1e-12);
    }
}

TEST(FuseDensity, MixtureMeanFollowsOdds) {
    double total = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(static_cast<std::uint64_t>(s));
        const auto a = support::point_component(L(1, 1, 1), 0.5, 0, 0);
        const auto b = support::point_component(L(1, 1, 1), 0.75, 10, 0);
        const std::vector<DensitySource> src{{a.existence, a.density}, {b.existence, b.density}};
        const auto fused = fuse_density(src, 400, rng);
        total += fused->mean().px;
    }
    // Odds 1 and 3, so the mixture puts 3/4 of its mass at x = 10.
    EXPECT_NEAR(total / seeds, 7.5, 0.1);
}

TEST(FuseDensity, SharedSetPassesThrough) {
    Rng rng(1);
    const auto a = support::point_component(L(1, 1, 1), 0.5, 3, 4);
    const std::vector<DensitySource> src{{0.5, a.density}, {0.9, a.density}};
    EXPECT_EQ(fuse_density(src, 100, rng), a.density);
}

TEST(Complementary, SelfOnlyIsIdentity) {
    Rng rng(1);
    const LmbDensity d(4, 1, {support::point_component(L(1, 1, 1), 0.4, 0, 0)});
    const auto out = complementary_fuse(d, {}, FusionConfig{}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_DOUBLE_EQ(out.components()[0].existence, 0.4);
}

TEST(Complementary, DisjointLabelsAreUnioned) {
    Rng rng(1);
    const LmbDensity a(4, 1, {support::point_component(L(1, 1, 1), 0.4, 0, 0)});
    const std::vector<LmbDensity> b{LmbDensity(4, 2, {support::point_component(L(2, 2, 1), 0.6, 30, 0)})};
    const auto out = complementary_fuse(a, b, FusionConfig{}, rng);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_DOUBLE_EQ(out.find(L(1, 1, 1))->existence, 0.4);
    EXPECT_DOUBLE_EQ(out.find(L(2, 2, 1))->existence, 0.6);
    EXPECT_EQ(out.owner(), 1u);
}

TEST(Complementary, SharedLabelIsFused) {
    Rng rng(1);
    const LmbDensity a(4, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0)});
    const std::vector<LmbDensity> b{LmbDensity(4, 2, {support::point_component(L(1, 1, 1), 0.5, 2, 0)})};
    const auto out = complementary_fuse(a, b, FusionConfig{}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(out.components()[0].existence, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(mean_px(out.components()[0]), 1.0, 0.15);
}

TEST(Complementary, RejectsTimeMismatch) {
    Rng rng(1);
    const std::vector<LmbDensity> b{LmbDensity(5, 2)};
    EXPECT_THROW(complementary_fuse(LmbDensity(4, 1), b, FusionConfig{}, rng), PreconditionError);
}

TEST(Duplicates, Examples) {
    const LmbDensity far(1, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0),
                                support::point_component(L(1, 2, 1), 0.5, 10, 0)});
    EXPECT_EQ(detect_duplicates(far, 2.0).size(), 2u);

    const LmbDensity near(1, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0),
                                 support::point_component(L(1, 2, 1), 0.5, 1, 0)});
    const auto c = detect_duplicates(near, 2.0);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0], (std::vector<Label>{L(1, 1, 1), L(1, 2, 1)}));

    // Chained: 0-1.5 and 1.5-3 are close, 0-3 is not, and all three cluster together.
    const LmbDensity chain(1, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0),
                                  support::point_component(L(1, 2, 1), 0.5, 1.5, 0),
                                  support::point_component(L(1, 3, 1), 0.5, 3, 0)});
    EXPECT_EQ(detect_duplicates(chain, 2.0).size(), 1u);

    const LmbDensity boundary(1, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0),
                                     support::point_component(L(1, 2, 1), 0.5, 2, 0)});
    EXPECT_EQ(detect_duplicates(boundary, 2.0).size(), 2u);
    EXPECT_THROW(detect_duplicates(boundary, 0.0), DomainError);
}

TEST(Duplicates, MatchPairwiseOracle) {
    Rng rng(4);
    std::uniform_real_distribution<double> u(0, 20);
    for (int t = 0; t < 200; ++t) {
        std::vector<BernoulliComponent> cs;
        for (std::uint32_t m = 1; m <= 8; ++m) cs.push_back(support::point_component(L(1, 1, m), 0.5, u(rng), u(rng)));
        const LmbDensity d(1, 1, cs);
        std::vector<int> id(8);
        std::iota(id.begin(), id.end(), 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j)
                    if (planar_distance(eap_estimate(cs[i]), eap_estimate(cs[j])) < 3.0 && id[j] > id[i]) {
                        id[j] = id[i];
                        changed = true;
                    }
        }
        std::set<int> roots(id.begin(), id.end());
        EXPECT_EQ(detect_duplicates(d, 3.0).size(), roots.size());
    }
}

TEST(Merge, PairKeepsOlderLabelAndUnionExistence) {
    Rng rng(1);
    const auto a = support::point_component(L(3, 2, 1), 0.5, 0, 0);
    const auto b = support::point_component(L(2, 5, 4), 0.5, 1, 0);
    const auto m = merge_pair(a, b, 2000, rng);
    EXPECT_EQ(m.label, L(2, 5, 4));
    EXPECT_NEAR(m.existence, 0.75, 1e-12);
    EXPECT_NEAR(mean_px(m), 0.5, 0.05);
    EXPECT_EQ(m.particles().size(), 2000u);

    const auto c = support::point_component(L(4, 1, 1), 0.9, 0, 0);
    const auto d = support::point_component(L(4, 1, 2), 0.1, 10, 0);
    EXPECT_NEAR(mean_px(merge_pair(c, d, 4000, rng)), 1.0, 0.2);
    EXPECT_THROW(merge_pair(c, c, 10, rng), PreconditionError);
}

TEST(Merge, ClusterOfThree) {
    FusionConfig cfg;
    cfg.merged_particle_count = 100;
    std::vector<BernoulliComponent> cs{support::point_component(L(1, 1, 1), 0.5, 0, 0),
                                       support::point_component(L(1, 2, 1), 0.5, 1, 0),
                                       support::point_component(L(1, 3, 1), 0.5, 0.5, 0.5)};
    for (int perm = 0; perm < 3; ++perm) {
        Rng rng(1);
        std::rotate(cs.begin(), cs.begin() + 1, cs.end());
        const auto out = merge_all(LmbDensity(1, 1, cs), cfg, rng);
        ASSERT_EQ(out.size(), 1u);
        EXPECT_NEAR(out.components()[0].existence, 0.875, 1e-12);
        EXPECT_EQ(out.components()[0].label, L(1, 1, 1));
    }
}

TEST(Merge, NoDuplicatesLeavesDensityAlone) {
    Rng rng(1);
    const LmbDensity d(1, 1, {support::point_component(L(1, 1, 1), 0.5, 0, 0),
                              support::point_component(L(1, 2, 1), 0.5, 50, 0)});
    const auto out = merge_all(d, FusionConfig{}, rng);
    EXPECT_EQ(out.labels(), d.labels());
}

TEST(Consensus, IsolatedNodeIsUnchanged) {
    PosteriorMap m;
    m.emplace(1, LmbDensity(2, 1, {support::point_component(L(1, 1, 1), 0.3, 0, 0)}));
    net::NetworkGraph g;
    g.add_node(1);
    const auto out = run_consensus(m, g, no_merge(3), 7);
    EXPECT_DOUBLE_EQ(out.at(1).components()[0].existence, 0.3);
}

TEST(Consensus, ZeroRoundsIsIdentity) {
    PosteriorMap m;
    m.emplace(1, LmbDensity(2, 1, {support::point_component(L(1, 1, 1), 0.3, 0, 0)}));
    m.emplace(2, LmbDensity(2, 2, {support::point_component(L(1, 2, 1), 0.6, 10, 0)}));
    const auto out = run_consensus(m, net::complete_graph(2), no_merge(0), 7);
    EXPECT_EQ(out.at(1).labels(), m.at(1).labels());
    EXPECT_EQ(out.at(2).labels(), m.at(2).labels());
}

TEST(Consensus, CompleteGraphOneRoundAgrees) {
    PosteriorMap m;
    for (NodeId i = 1; i <= 4; ++i)
        m.emplace(i, LmbDensity(2, i, {support::point_component(L(1, i, 1), 0.2 * i, 20.0 * i, 0)}));
    const auto out = run_consensus(m, net::complete_graph(4), no_merge(1), 7);
    for (NodeId i = 1; i <= 4; ++i) {
        EXPECT_EQ(out.at(i).size(), 4u);
        EXPECT_EQ(out.at(i).labels(), out.at(1).labels());
    }
}

TEST(Consensus, LabelsSpreadOneHopPerRound) {
    PosteriorMap m;
    for (NodeId i = 1; i <= 3; ++i)
        m.emplace(i, LmbDensity(2, i, {support::point_component(L(1, i, 1), 0.5, 20.0 * i, 0)}));
    const auto g = net::line_graph(3);
    EXPECT_EQ(run_consensus(m, g, no_merge(1), 7).at(1).size(), 2u);
    EXPECT_EQ(run_consensus(m, g, no_merge(2), 7).at(1).size(), 3u);
}

TEST(Consensus, LabelReachMatchesHopDistance) {
    Rng rng(31);
    std::uniform_real_distribution<double> u(0, 300);
    for (int t = 0; t < 20; ++t) {
        std::map<NodeId, Eigen::Vector2d> pos;
        PosteriorMap m;
        for (NodeId i = 1; i <= 7; ++i) {
            pos[i] = {u(rng), u(rng)};
            m.emplace(i, LmbDensity(2, i, {support::point_component(L(1, i, 1), 0.5, 100.0 * i, 0)}));
        }
        const auto g = net::build_graph(pos, 120.0);
        for (std::size_t rounds = 0; rounds <= 3; ++rounds) {
            const auto out = run_consensus(m, g, no_merge(rounds), 5);
            for (NodeId i = 1; i <= 7; ++i) {
                const auto h = hops_from(g, i);
                for (NodeId j = 1; j <= 7; ++j) {
                    const bool reach = h.contains(j) && h.at(j) <= rounds;
                    EXPECT_EQ(out.at(i).contains(L(1, j, 1)), reach);
                }
            }
        }
    }
}

TEST(Consensus, DeterministicForSeed) {
    PosteriorMap m;
    Rng rng(2);
    for (NodeId i = 1; i <= 3; ++i)
        m.emplace(i, LmbDensity(2, i, {support::cloud_component(L(1, 1, 1), 0.5, i, 0, 1, 50, rng)}));
    FusionConfig cfg;
    cfg.merged_particle_count = 50;
    const auto a = run_consensus(m, net::line_graph(3), cfg, 99);
    const auto b = run_consensus(m, net::line_graph(3), cfg, 99);
    for (NodeId i = 1; i <= 3; ++i)
        EXPECT_EQ(net::serialize(net::to_message(a.at(i), 0)), net::serialize(net::to_message(b.at(i), 0)));
}
