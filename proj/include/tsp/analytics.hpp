#pragma once

// Time-averaged divergence and curl of edge-signal matrices, histograms, and
// rankings of sources, sinks and conservative circulations.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "errors.hpp"
#include "statistical.hpp"

namespace tsp {

namespace detail {

inline void check_edge_signal(const IncidencePair& inc, const SignalMatrix& s1)
{
    if (s1.level != 1) throw DimensionMismatch("expected a level-1 (edge) signal");
    if (s1.values.rows() != inc.n_edges())
        throw DimensionMismatch("edge signal has " + std::to_string(s1.values.rows()) + " rows, complex has " +
                                std::to_string(inc.n_edges()) + " edges");
    if (s1.values.cols() == 0) throw EmptyInput("edge signal has no samples");
}

/// Row means summed left to right in sample order.
inline Eigen::VectorXd row_means(const Eigen::MatrixXd& x)
{
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) acc += x(r, c);
        out(r) = acc / static_cast<double>(x.cols());
    }
    return out;
}

}  // namespace detail

/// (1/M) sum_m B1 s1(m), computed as B1 applied to the row means.
inline Eigen::VectorXd mean_divergence(const IncidencePair& inc, const SignalMatrix& s1)
{
    detail::check_edge_signal(inc, s1);
    return inc.b1d() * detail::row_means(s1.values);
}

/// (1/M) sum_m B2^T s1(m).
inline Eigen::VectorXd mean_curl(const IncidencePair& inc, const SignalMatrix& s1)
{
    detail::check_edge_signal(inc, s1);
    return inc.b2d().transpose() * detail::row_means(s1.values);
}

/// Positions of the k smallest |value|, ascending; ties go to the lower position.
inline std::vector<std::size_t> conservative_ranking(const Eigen::VectorXd& mean_curl, std::size_t k)
{
    if (k > static_cast<std::size_t>(mean_curl.size()))
        throw ConfigError("k=" + std::to_string(k) + " exceeds " + std::to_string(mean_curl.size()) + " triangles");
    std::vector<std::size_t> order(static_cast<std::size_t>(mean_curl.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(mean_curl(static_cast<Eigen::Index>(a))) < std::abs(mean_curl(static_cast<Eigen::Index>(b)));
    });
    order.resize(k);
    return order;
}

struct Histogram {
    std::vector<double> edges;  // n_bins + 1
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// A constant input is binned over [v - 0.5, v + 0.5].
inline Histogram histogram(const Eigen::VectorXd& values, int n_bins)
{
    if (values.size() == 0) throw EmptyInput("histogram of an empty vector");
    if (n_bins < 1) throw ConfigError("histogram needs at least one bin");
    double lo = values.minCoeff();
    double hi = values.maxCoeff();
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw EmptyInput("histogram input is not finite");
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    const double width = (hi - lo) / n_bins;
    h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + width * b;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        auto bin = static_cast<int>(std::floor((values(i) - lo) / width));
        bin = std::clamp(bin, 0, n_bins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

/// Number of listed triangles each node belongs to.
inline Eigen::VectorXi node_participation(int n_nodes, const std::vector<Triangle>& triangles)
{
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(n_nodes);
    for (const auto& t : triangles)
        for (int v : t) ++counts(v);
    return counts;
}

struct RankedNode {
    int node;
    double value;
};

struct RankedTriangle {
    Triangle triangle;
    double circulation;
};

struct AnalysisConfig {
    int n_bins = 50;
    std::size_t top_nodes = 10;
    std::size_t conservative_count = 20;
};

struct AnalysisReport {
    Eigen::VectorXd mean_divergence;
    Eigen::VectorXd mean_curl;
    Histogram divergence_histogram;
    std::optional<Histogram> curl_histogram;  // absent when T = 0
    std::vector<RankedNode> top_sources;      // most positive mean divergence first
    std::vector<RankedNode> top_sinks;        // most negative first
    std::vector<RankedTriangle> conservative_triangles;
    Eigen::VectorXi node_triangle_participation;  // over conservative_triangles
};

inline AnalysisReport analyze(const OrientedComplex& cx, const SignalMatrix& s1, const AnalysisConfig& cfg = {})
{
    const IncidencePair inc = incidence(cx);
    AnalysisReport r;
    r.mean_divergence = mean_divergence(inc, s1);
    r.mean_curl = mean_curl(inc, s1);
    r.divergence_histogram = histogram(r.mean_divergence, cfg.n_bins);
    if (r.mean_curl.size()) r.curl_histogram = histogram(r.mean_curl, cfg.n_bins);

    std::vector<int> nodes(static_cast<std::size_t>(cx.n_nodes()));
    std::iota(nodes.begin(), nodes.end(), 0);
    const std::size_t k = std::min(cfg.top_nodes, nodes.size());
    auto by = [&](auto cmp) {
        auto sorted = nodes;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [&](int a, int b) { return cmp(r.mean_divergence(a), r.mean_divergence(b)); });
        std::vector<RankedNode> out;
        for (std::size_t i = 0; i < k; ++i) out.push_back({sorted[i], r.mean_divergence(sorted[i])});
        return out;
    };
    r.top_sources = by(std::greater<>());
    r.top_sinks = by(std::less<>());

    const std::size_t kc = std::min(cfg.conservative_count, cx.n_triangles());
    std::vector<Triangle> chosen;
    for (auto idx : conservative_ranking(r.mean_curl, kc)) {
        r.conservative_triangles.push_back({cx.triangles()[idx], r.mean_curl(static_cast<Eigen::Index>(idx))});
        chosen.push_back(cx.triangles()[idx]);
    }
    r.node_triangle_participation = node_participation(cx.n_nodes(), chosen);
    return r;
}

}  // namespace tsp
