#include <gtest/gtest.h>

#include <limits>
#include <set>

#include <tsp/hodge.hpp>
#include <tsp/synthetic.hpp>

#include "oracles.hpp"

using namespace tsp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(Xoshiro, StreamMatchesReference)
{
    // reference values from an independent implementation of the algorithm
    Xoshiro256 rng(12345);
    EXPECT_EQ(rng.next(), 0xbe6a36374160d49bULL);
    EXPECT_EQ(rng.next(), 0x214aaa0637a688c6ULL);
    EXPECT_EQ(rng.next(), 0xf69d16de9954d388ULL);
    EXPECT_EQ(rng.uniform(), 0.048340114836345816);
}

TEST(Xoshiro, BelowIsInRangeAndCoversValues)
{
    Xoshiro256 rng(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(GenComplex, FillProbabilityExtremes)
{
    const auto full = gen_complex(12, 0.5, 1.0, 3);
    EXPECT_EQ(full.triangles(), candidate_triangles(full));
    EXPECT_EQ(gen_complex(12, 0.5, 0.0, 3).n_triangles(), 0u);
    EXPECT_EQ(gen_complex(12, 0.5, 0.0, 3).edges(), full.edges());
    EXPECT_EQ(gen_complex(6, 1.0, 0.0, 0).n_edges(), 15u);
    EXPECT_THROW(gen_complex(5, 1.5, 0.0, 0), ConfigError);
}

TEST(GenComplex, Deterministic)
{
    EXPECT_EQ(gen_complex(15, 0.4, 0.5, 99), gen_complex(15, 0.4, 0.5, 99));
    EXPECT_FALSE(gen_complex(15, 0.4, 0.5, 99) == gen_complex(15, 0.4, 0.5, 100));
}

TEST(GenEdgeSignals, PureComponents)
{
    const auto cx = gen_complex(10, 0.6, 0.6, 5);
    const auto inc = incidence(cx);
    const auto g = gen_edge_signals(cx, {1, 0, 0, 20, kInf, 0, 0}, 1);
    EXPECT_LT((inc.b2d().transpose() * g.Y).cwiseAbs().maxCoeff(), 1e-10);
    const auto s = gen_edge_signals(cx, {0, 1, 0, 20, kInf, 0, 0}, 1);
    EXPECT_LT((inc.b1d() * s.Y).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((s.Y - inc.b2d() * s.S2).norm(), 1e-10 * s.Y.norm());
}

TEST(GenEdgeSignals, HollowTriangleHarmonic)
{
    const auto r = gen_edge_signals(oracle::hollow_triangle(), {0, 0, 1, 6, kInf, 0, 0}, 2);
    Eigen::Vector3d dir(1, -1, 1);
    dir /= std::sqrt(3.0);
    for (Eigen::Index m = 0; m < 6; ++m) {
        const Eigen::Vector3d c = r.Y.col(m);
        EXPECT_LT((c - dir * dir.dot(c)).norm(), 1e-12);
    }
}

TEST(GenEdgeSignals, EmptySubspaceRejected)
{
    EXPECT_THROW(gen_edge_signals(oracle::hollow_triangle(), {0, 1, 0, 5, kInf, 0, 0}, 1), ZeroSubspace);
    EXPECT_THROW(gen_edge_signals(oracle::filled_triangle(), {0, 0, 1, 5, kInf, 0, 0}, 1), ZeroSubspace);
    EXPECT_THROW(gen_edge_signals(oracle::filled_triangle(), {-1, 0, 0, 5, kInf, 0, 0}, 1), ConfigError);
}

TEST(GenEdgeSignals, EnergyMixRecoveredByDecomposition)
{
    oracle::RandomComplex rc;
    std::mt19937_64 rng(8);
    do rc = oracle::random_complex(rng, 12, 0.5, 0.3);
    while (partition_subspaces(incidence(rc.cx)).dims().harmonic == 0 || rc.cx.n_triangles() == 0);
    const double w[3] = {0.5, 0.3, 0.2};
    const auto sig = gen_edge_signals(rc.cx, {w[0], w[1], w[2], 1000, kInf, 0, 0}, 3);
    const auto spec = partition_subspaces(incidence(rc.cx));
    double e[3] = {0, 0, 0};
    for (Eigen::Index m = 0; m < sig.Y.cols(); ++m) {
        const auto p = hodge_decompose(spec, sig.Y.col(m));
        e[0] += p.irrotational.squaredNorm();
        e[1] += p.solenoidal.squaredNorm();
        e[2] += p.harmonic.squaredNorm();
    }
    const double total = e[0] + e[1] + e[2];
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(e[k] / total, w[k], 0.05 * w[k]);
}

TEST(GenEdgeSignals, NoiseMatchesSnr)
{
    const auto cx = gen_complex(12, 0.6, 0.5, 9);
    const auto clean = gen_edge_signals(cx, {1, 1, 1, 2000, kInf, 0, 0}, 4);
    const auto noisy = gen_edge_signals(cx, {1, 1, 1, 2000, 10.0, 0, 0}, 4);
    const double ratio = clean.Y.squaredNorm() / (noisy.Y - clean.Y).squaredNorm();
    EXPECT_NEAR(10.0 * std::log10(ratio), 10.0, 0.1);
}

TEST(GenEdgeSignals, SeededDeterminism)
{
    const auto cx = gen_complex(10, 0.6, 0.5, 1);
    const auto a = gen_edge_signals(cx, {1, 1, 1, 30, 20.0, 0, 0}, 77);
    const auto b = gen_edge_signals(cx, {1, 1, 1, 30, 20.0, 0, 0}, 77);
    EXPECT_TRUE((a.Y.array() == b.Y.array()).all());
}

TEST(PlantedInstance, StructureAndDeterminism)
{
    PlantedSpec ps;
    const auto a = gen_planted_instance(ps, 11);
    const auto b = gen_planted_instance(ps, 11);
    EXPECT_TRUE((a.Y.array() == b.Y.array()).all());
    EXPECT_EQ(a.complex, b.complex);
    ASSERT_EQ(a.planted_triangles.size(), 5u);
    EXPECT_EQ(a.complex.triangles(), a.planted_triangles);

    const auto cands = candidate_triangles(a.complex);
    std::set<Edge> used;
    for (const auto& t : a.planted_triangles) {
        EXPECT_TRUE(std::binary_search(cands.begin(), cands.end(), t));
        for (const auto& f : faces(t)) EXPECT_TRUE(used.insert(f).second) << "planted triangles share an edge";
    }
    EXPECT_GT(a.harm_l1, 0.0);
    EXPECT_EQ(a.Y.rows(), static_cast<Eigen::Index>(a.complex.n_edges()));
    EXPECT_EQ(a.Y.cols(), 200);
}

TEST(PlantedInstance, ImpossibleRequest)
{
    PlantedSpec ps;
    ps.n_nodes = 4;
    ps.edge_prob = 1.0;
    ps.n_planted = 3;
    EXPECT_THROW(gen_planted_instance(ps, 1), ConfigError);
}
