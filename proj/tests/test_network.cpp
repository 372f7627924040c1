#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "support.hpp"

using namespace cofuse;
using namespace cofuse::net;
using support::L;

TEST(Graph, RangeExamples) {
    std::map<NodeId, Eigen::Vector2d> near{{1, {0, 0}}, {2, {30, 0}}};
    EXPECT_TRUE(build_graph(near, 100).connected(1, 2));
    std::map<NodeId, Eigen::Vector2d> far{{1, {0, 0}}, {2, {150, 0}}};
    EXPECT_FALSE(build_graph(far, 100).connected(1, 2));
    EXPECT_EQ(build_graph(far, 100).node_count(), 2u);
}

TEST(Graph, CollinearChain) {
    std::map<NodeId, Eigen::Vector2d> p{{1, {0, 0}}, {2, {80, 0}}, {3, {160, 0}}};
    const auto g = build_graph(p, 100);
    EXPECT_TRUE(g.connected(1, 2));
    EXPECT_TRUE(g.connected(2, 3));
    EXPECT_FALSE(g.connected(1, 3));
    EXPECT_EQ(g.neighbors(2), (std::vector<NodeId>{1, 3}));
    EXPECT_EQ(g.closed_neighborhood(2), (std::vector<NodeId>{1, 2, 3}));
}

TEST(Graph, LongRangeNodeReachesShortRangeNodes) {
    std::map<NodeId, NodePlacement> p{{1, {{0, 0}, 50}}, {2, {{110, 0}, 120}}};
    EXPECT_TRUE(build_graph(p).connected(1, 2));
}

TEST(Graph, SymmetricWithoutSelfLoops) {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0, 200);
    for (int t = 0; t < 100; ++t) {
        std::map<NodeId, Eigen::Vector2d> p;
        for (NodeId i = 1; i <= 8; ++i) p[i] = {u(rng), u(rng)};
        const auto g = build_graph(p, 80);
        for (NodeId i = 1; i <= 8; ++i) {
            EXPECT_FALSE(g.connected(i, i));
            for (NodeId j = 1; j <= 8; ++j) {
                EXPECT_EQ(g.connected(i, j), g.connected(j, i));
                if (i != j) {
                    EXPECT_EQ(g.connected(i, j), (p[i] - p[j]).norm() <= 80);
                }
            }
        }
    }
}

TEST(Graph, Shapes) {
    EXPECT_EQ(line_graph(5).edge_count(), 4u);
    EXPECT_EQ(complete_graph(5).edge_count(), 10u);
    EXPECT_THROW(line_graph(2).neighbors(9), PreconditionError);
}

TEST(Message, RoundTripRandom) {
    Rng rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::uniform_real_distribution<double> r(0, 1);
    std::uniform_int_distribution<int> count(0, 4);
    for (int t = 0; t < 1000; ++t) {
        std::vector<BernoulliComponent> cs;
        const int n = count(rng);
        for (int c = 0; c < n; ++c) {
            std::vector<Particle> ps;
            const int m = 1 + count(rng);
            for (int k = 0; k < m; ++k) ps.push_back({{u(rng), u(rng), u(rng), u(rng), r(rng)}, r(rng) + 1e-3});
            cs.push_back({L(static_cast<Time>(t), static_cast<NodeId>(c + 1), 3), r(rng), share(ParticleSet{ps})});
        }
        const auto msg = to_message(LmbDensity(static_cast<Time>(t + 1), 4, cs), static_cast<std::uint32_t>(t % 3));
        EXPECT_EQ(deserialize(serialize(msg)), msg);
        EXPECT_EQ(deserialize(serialize(msg, Encoding::Cbor), Encoding::Cbor), msg);
    }
}

TEST(Message, DensityRoundTrip) {
    Rng rng(1);
    const LmbDensity d(9, 2, {support::cloud_component(L(3, 2, 1), 0.4, 1, 2, 1, 20, rng)});
    const auto back = to_density(deserialize(serialize(to_message(d, 1))));
    EXPECT_EQ(back.time(), 9);
    EXPECT_EQ(back.owner(), 2u);
    EXPECT_EQ(back.labels(), d.labels());
    EXPECT_DOUBLE_EQ(back.components()[0].existence, 0.4);
}

TEST(Message, EmptyPosterior) {
    const auto msg = to_message(LmbDensity(3, 5), 2);
    const auto back = deserialize(serialize(msg));
    EXPECT_TRUE(back.components.empty());
    EXPECT_EQ(back.consensus_index, 2u);
}

TEST(Message, MalformedInputIsParseError) {
    const auto text = serialize(to_message(LmbDensity(3, 5), 0));
    EXPECT_THROW(deserialize(text.substr(0, text.size() / 2)), ParseError);
    EXPECT_THROW(deserialize("{\"schema\":\"other\"}"), ParseError);
    const auto cbor = serialize(to_message(LmbDensity(3, 5), 0), Encoding::Cbor);
    EXPECT_THROW(deserialize(cbor.substr(0, cbor.size() - 1), Encoding::Cbor), ParseError);
}

TEST(Message, DumpWritesReadableFile) {
    const auto dir = std::filesystem::temp_directory_path() / "cofuse_dump_test";
    std::filesystem::remove_all(dir);
    const auto msg = to_message(LmbDensity(4, 3), 1);
    const auto path = dump_message(dir, msg);
    EXPECT_EQ(path.filename(), "scan_4_round_1.json");
    std::ifstream f(path);
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    EXPECT_EQ(deserialize(text), msg);
    std::filesystem::remove_all(dir);
}
