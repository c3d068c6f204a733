#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include <tsp/analytics.hpp>
#include <tsp/hodge.hpp>

#include "oracles.hpp"

using namespace tsp;

namespace {

SignalMatrix edges_signal(const Eigen::MatrixXd& m) { return {m, 1}; }

}  // namespace

TEST(MeanOperators, HandExamples)
{
    const auto inc = incidence(oracle::filled_triangle());
    Eigen::MatrixXd cyc(3, 4);
    cyc.colwise() = Eigen::Vector3d(1, -1, 1);
    EXPECT_EQ(mean_curl(inc, edges_signal(cyc)), Eigen::VectorXd::Constant(1, 3.0));
    EXPECT_LT(mean_divergence(inc, edges_signal(cyc)).norm(), 1e-15);

    const auto path = build_complex(4, {{0, 1}, {1, 2}, {2, 3}}, {});
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(3, 5);
    flow.row(0).setOnes();
    Eigen::VectorXd want(4);
    want << -1, 1, 0, 0;
    EXPECT_EQ(mean_divergence(incidence(path), edges_signal(flow)), want);
    EXPECT_EQ(mean_curl(incidence(path), edges_signal(flow)).size(), 0);
}

TEST(MeanOperators, SingleSampleAndErrors)
{
    std::mt19937_64 rng(1);
    auto rc = oracle::random_complex(rng, 8, 0.6, 0.5);
    const auto inc = incidence(rc.cx);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(rng, inc.n_edges(), 1);
    EXPECT_LT((mean_divergence(inc, edges_signal(x)) - divergence(inc, x.col(0))).norm(), 1e-14);
    EXPECT_THROW(mean_divergence(inc, edges_signal(x.topRows(2))), DimensionMismatch);
    EXPECT_THROW(mean_curl(inc, SignalMatrix{x, 0}), DimensionMismatch);
    EXPECT_THROW(mean_curl(inc, edges_signal(Eigen::MatrixXd(inc.n_edges(), 0))), EmptyInput);
}

TEST(MeanOperators, GradientAndSolenoidalAnnihilation)
{
    std::mt19937_64 rng(2);
    auto rc = oracle::random_complex(rng, 10, 0.6, 0.6);
    const auto inc = incidence(rc.cx);
    const Eigen::MatrixXd grad = inc.b1d().transpose() * oracle::gaussian_matrix(rng, inc.n_nodes(), 30);
    const Eigen::MatrixXd sol = inc.b2d() * oracle::gaussian_matrix(rng, inc.n_triangles(), 30);
    EXPECT_LT(mean_curl(inc, edges_signal(grad)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(mean_divergence(inc, edges_signal(sol)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MeanOperators, Linearity)
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        auto rc = oracle::random_complex(rng, 9, 0.6, 0.5);
        const auto inc = incidence(rc.cx);
        const Eigen::MatrixXd x = oracle::gaussian_matrix(rng, inc.n_edges(), 40);
        Eigen::VectorXd div = Eigen::VectorXd::Zero(inc.n_nodes());
        Eigen::VectorXd cur = Eigen::VectorXd::Zero(inc.n_triangles());
        for (Eigen::Index m = 0; m < x.cols(); ++m) {
            div += divergence(inc, x.col(m));
            cur += curl(inc, x.col(m));
        }
        div /= 40.0;
        cur /= 40.0;
        EXPECT_LT((mean_divergence(inc, edges_signal(x)) - div).cwiseAbs().maxCoeff(), 1e-12);
        if (cur.size()) EXPECT_LT((mean_curl(inc, edges_signal(x)) - cur).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ConservativeRanking, Examples)
{
    EXPECT_EQ(conservative_ranking(Eigen::Vector3d(3, -0.1, 0.5), 2), (std::vector<std::size_t>{1, 2}));
    EXPECT_TRUE(conservative_ranking(Eigen::Vector3d(3, -0.1, 0.5), 0).empty());
    EXPECT_EQ(conservative_ranking(Eigen::Vector3d(-1, 1, 0.5), 3), (std::vector<std::size_t>{2, 0, 1}));
    EXPECT_THROW(conservative_ranking(Eigen::Vector3d(1, 2, 3), 4), ConfigError);
}

TEST(ConservativeRanking, PrefixOfFullSort)
{
    std::mt19937_64 rng(4);
    const Eigen::VectorXd v = oracle::gaussian_matrix(rng, 30, 1).col(0);
    const auto full = conservative_ranking(v, 30);
    for (std::size_t k = 0; k <= 30; k += 5) {
        const auto part = conservative_ranking(v, k);
        EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
    }
    for (std::size_t i = 1; i < full.size(); ++i)
        EXPECT_LE(std::abs(v(static_cast<Eigen::Index>(full[i - 1]))), std::abs(v(static_cast<Eigen::Index>(full[i]))));
}

TEST(Histogram, Examples)
{
    const auto h = histogram(Eigen::Vector4d(0, 1, 2, 3), 2);
    EXPECT_EQ(h.edges, (std::vector<double>{0, 1.5, 3}));
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 2}));

    const auto c = histogram(Eigen::VectorXd::Constant(5, 2.0), 4);
    EXPECT_EQ(std::count_if(c.counts.begin(), c.counts.end(), [](std::size_t n) { return n > 0; }), 1);
    EXPECT_EQ(std::accumulate(c.counts.begin(), c.counts.end(), std::size_t{0}), 5u);

    EXPECT_THROW(histogram(Eigen::VectorXd(0), 3), EmptyInput);
    EXPECT_THROW(histogram(Eigen::Vector2d(0, 1), 0), ConfigError);
}

TEST(Histogram, NormalSampleChiSquare)
{
    std::mt19937_64 rng(5);
    const Eigen::VectorXd x = oracle::gaussian_matrix(rng, 100000, 1).col(0);
    const auto h = histogram(x, 50);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 100000u);
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    double chi2 = 0.0;
    int dof = 0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double expected = 100000.0 * (cdf(h.edges[b + 1]) - cdf(h.edges[b]));
        if (expected < 5.0) continue;
        chi2 += (h.counts[b] - expected) * (h.counts[b] - expected) / expected;
        ++dof;
    }
    const double p = boost::math::gamma_q((dof - 1) / 2.0, chi2 / 2.0);
    EXPECT_GT(p, 0.001) << "chi2=" << chi2 << " dof=" << dof;
}

TEST(Analyze, ReportInvariants)
{
    std::mt19937_64 rng(6);
    auto rc = oracle::random_complex(rng, 14, 0.6, 0.6);
    const auto inc = incidence(rc.cx);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(rng, inc.n_edges(), 25);
    AnalysisConfig cfg;
    cfg.n_bins = 7;
    cfg.top_nodes = 4;
    cfg.conservative_count = 6;
    const auto r = analyze(rc.cx, edges_signal(x), cfg);

    EXPECT_EQ(std::accumulate(r.divergence_histogram.counts.begin(), r.divergence_histogram.counts.end(), std::size_t{0}),
              static_cast<std::size_t>(inc.n_nodes()));
    ASSERT_TRUE(r.curl_histogram.has_value());
    EXPECT_EQ(std::accumulate(r.curl_histogram->counts.begin(), r.curl_histogram->counts.end(), std::size_t{0}),
              static_cast<std::size_t>(inc.n_triangles()));

    ASSERT_EQ(r.top_sources.size(), 4u);
    ASSERT_EQ(r.top_sinks.size(), 4u);
    EXPECT_EQ(r.top_sources.front().value, r.mean_divergence.maxCoeff());
    EXPECT_EQ(r.top_sinks.front().value, r.mean_divergence.minCoeff());

    ASSERT_EQ(r.conservative_triangles.size(), 6u);
    for (std::size_t i = 1; i < 6; ++i)
        EXPECT_LE(std::abs(r.conservative_triangles[i - 1].circulation), std::abs(r.conservative_triangles[i].circulation));

    EXPECT_EQ(r.node_triangle_participation.sum(), 18);
    for (int n = 0; n < rc.n; ++n) {
        int count = 0;
        for (const auto& t : r.conservative_triangles)
            count += std::count(t.triangle.begin(), t.triangle.end(), n);
        EXPECT_EQ(r.node_triangle_participation(n), count);
    }
}

TEST(Analyze, GraphWithoutTriangles)
{
    const auto path = build_complex(3, {{0, 1}, {1, 2}}, {});
    const auto r = analyze(path, edges_signal(Eigen::MatrixXd::Ones(2, 3)));
    EXPECT_FALSE(r.curl_histogram.has_value());
    EXPECT_TRUE(r.conservative_triangles.empty());
    EXPECT_EQ(r.top_sources.size(), 3u);
}
