#pragma once

// Statistical inference of a 2-order complex from node time series:
// Pearson skeleton, total-correlation triangle weights, top-k selection,
// inclusion closure and co-fluctuation edge signals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace tsp {

/// Row per node, column per time sample.
struct NodeSeriesSet {
    Eigen::MatrixXd series;
    std::string subject_id;
};

/// Column m holds the level-k signal at sample m; rows follow the canonical
/// simplex order of the associated complex.
struct SignalMatrix {
    Eigen::MatrixXd values;
    int level = 1;
};

struct TriangleWeights {
    std::vector<Triangle> triples;
    Eigen::VectorXd weights;
};

enum class TcEstimator { Gaussian, Binned };

/// Covariance ridge added before any determinant.
inline constexpr double kCovarianceRidge = 1e-12;
/// Determinants below this are rejected as degenerate.
inline constexpr double kMinDeterminant = 1e-300;

inline std::uint64_t n_choose_2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
inline std::uint64_t n_choose_3(std::uint64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

namespace detail {

inline void require_variance(double sd, double scale, Eigen::Index row)
{
    if (!(sd > 1e-12 * std::max(1.0, scale)))
        throw ZeroVariance("row " + std::to_string(row) + " has zero variance");
}

inline void require_samples(const Eigen::MatrixXd& x, Eigen::Index min_samples)
{
    if (x.cols() < min_samples)
        throw DimensionMismatch("need at least " + std::to_string(min_samples) + " time samples, got " +
                                std::to_string(x.cols()));
}

}  // namespace detail

/// Row-wise z-score using the sample standard deviation (denominator M-1).
inline NodeSeriesSet zscore(const NodeSeriesSet& in)
{
    detail::require_samples(in.series, 2);
    NodeSeriesSet out{Eigen::MatrixXd(in.series.rows(), in.series.cols()), in.subject_id};
    const double denom = static_cast<double>(in.series.cols() - 1);
    for (Eigen::Index r = 0; r < in.series.rows(); ++r) {
        const auto row = in.series.row(r);
        const double mean = row.mean();
        const double sd = std::sqrt((row.array() - mean).square().sum() / denom);
        detail::require_variance(sd, row.cwiseAbs().maxCoeff(), r);
        out.series.row(r) = (row.array() - mean) / sd;
    }
    return out;
}

/// |Pearson correlation| between every pair of rows (signed when requested).
inline Eigen::MatrixXd pearson_abs_matrix(const NodeSeriesSet& in, bool keep_sign = false)
{
    const Eigen::MatrixXd z = zscore(in).series;
    const double denom = static_cast<double>(z.cols() - 1);
    Eigen::MatrixXd r = (z * z.transpose()) / denom;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < r.cols(); ++j) {
            double v = std::clamp(0.5 * (r(i, j) + r(j, i)), -1.0, 1.0);
            if (!keep_sign) v = std::abs(v);
            r(i, j) = r(j, i) = v;
        }
    }
    return r;
}

/// Number of pairs kept for a retention fraction: floor(fraction * C(N,2)).
inline std::size_t edge_budget(int n_nodes, double fraction)
{
    const double pairs = static_cast<double>(n_choose_2(static_cast<std::uint64_t>(n_nodes)));
    return static_cast<std::size_t>(std::floor(fraction * pairs + 1e-9));
}

/// The floor(fraction * C(N,2)) strongest pairs of a symmetric weight matrix,
/// ordered by decreasing weight with ties in lexicographic order.
inline std::vector<Edge> select_top_edges(const Eigen::MatrixXd& weights, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("edge fraction must lie in (0, 1]");
    if (weights.rows() != weights.cols()) throw DimensionMismatch("weight matrix must be square");
    const int n = static_cast<int>(weights.rows());
    std::vector<Edge> pairs;
    pairs.reserve(n_choose_2(static_cast<std::uint64_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
    const std::size_t keep = std::min(pairs.size(), edge_budget(n, fraction));
    // pairs is lexicographic, so a stable sort on weight alone keeps the tie rule
    std::stable_sort(pairs.begin(), pairs.end(),
                     [&](const Edge& a, const Edge& b) { return weights(a[0], a[1]) > weights(b[0], b[1]); });
    pairs.resize(keep);
    return pairs;
}

/// Differential entropy (nats) of a Gaussian with covariance `cov`:
/// 0.5 * ln((2 pi e)^k det(cov)), after a 1e-12 ridge.
inline double gaussian_entropy(const Eigen::MatrixXd& cov)
{
    const auto k = cov.rows();
    const Eigen::MatrixXd reg = cov + kCovarianceRidge * Eigen::MatrixXd::Identity(k, k);
    const double det = reg.determinant();
    if (!(det >= kMinDeterminant)) throw DegenerateCovariance("covariance determinant " + std::to_string(det));
    return 0.5 * (static_cast<double>(k) * std::log(2.0 * std::numbers::pi * std::numbers::e) + std::log(det));
}

namespace detail {

inline double gaussian_tc_from_cov(const Eigen::Matrix3d& cov)
{
    double h = 0.0;
    for (int a = 0; a < 3; ++a) h += gaussian_entropy(cov.block(a, a, 1, 1));
    return h - gaussian_entropy(cov);
}

inline std::vector<int> bin_labels(const Eigen::VectorXd& x, int bins)
{
    const double lo = x.minCoeff();
    const double hi = x.maxCoeff();
    std::vector<int> out(static_cast<std::size_t>(x.size()), 0);
    if (hi <= lo) return out;
    const double width = (hi - lo) / bins;
    for (Eigen::Index m = 0; m < x.size(); ++m)
        out[static_cast<std::size_t>(m)] = std::min(bins - 1, static_cast<int>((x(m) - lo) / width));
    return out;
}

inline double plugin_entropy(const std::vector<std::uint32_t>& counts, double total)
{
    double h = 0.0;
    for (auto c : counts)
        if (c) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    return h;
}

inline double binned_tc(const std::vector<int>& a, const std::vector<int>& b, const std::vector<int>& c, int bins)
{
    const auto B = static_cast<std::size_t>(bins);
    std::vector<std::uint32_t> ca(B, 0), cb(B, 0), cc(B, 0), joint(B * B * B, 0);
    for (std::size_t m = 0; m < a.size(); ++m) {
        ++ca[static_cast<std::size_t>(a[m])];
        ++cb[static_cast<std::size_t>(b[m])];
        ++cc[static_cast<std::size_t>(c[m])];
        ++joint[(static_cast<std::size_t>(a[m]) * B + static_cast<std::size_t>(b[m])) * B +
                static_cast<std::size_t>(c[m])];
    }
    const double total = static_cast<double>(a.size());
    return plugin_entropy(ca, total) + plugin_entropy(cb, total) + plugin_entropy(cc, total) -
           plugin_entropy(joint, total);
}

inline Eigen::Matrix3d sample_cov3(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Eigen::VectorXd& xk)
{
    Eigen::Matrix<double, Eigen::Dynamic, 3> x(xi.size(), 3);
    x << xi, xj, xk;
    const Eigen::RowVector3d mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    return (c.transpose() * c) / static_cast<double>(xi.size() - 1);
}

}  // namespace detail

struct TcOptions {
    TcEstimator estimator = TcEstimator::Gaussian;
    int bins = 8;  // binned estimator only
};

/// Total correlation H(xi) + H(xj) + H(xk) - H(xi, xj, xk), in nats.
///
/// The Gaussian estimator reduces to -0.5 ln det(R) for the 3x3 correlation
/// matrix R. The binned estimator is the plug-in entropy over equal-width bins
/// spanning each variable's sample range.
inline double total_correlation(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Eigen::VectorXd& xk,
                                 const TcOptions& opt = {})
{
    if (xi.size() != xj.size() || xi.size() != xk.size())
        throw DimensionMismatch("total_correlation inputs differ in length");
    if (xi.size() < 3) throw DimensionMismatch("total_correlation needs at least 3 samples");
    if (opt.estimator == TcEstimator::Binned) {
        if (opt.bins < 1) throw ConfigError("bin count must be positive");
        return detail::binned_tc(detail::bin_labels(xi, opt.bins), detail::bin_labels(xj, opt.bins),
                                 detail::bin_labels(xk, opt.bins), opt.bins);
    }
    return detail::gaussian_tc_from_cov(detail::sample_cov3(xi, xj, xk));
}

/// Flat position of canonical triple (i,j,k) among all C(N,3) triples.
inline std::size_t triple_rank(int n, const Triangle& t)
{
    // triples with first index < i, then second index < j for this i, then k offset
    std::uint64_t r = 0;
    const auto N = static_cast<std::uint64_t>(n);
    for (int a = 0; a < t[0]; ++a) r += n_choose_2(N - 1 - static_cast<std::uint64_t>(a));
    for (int b = t[0] + 1; b < t[1]; ++b) r += N - 1 - static_cast<std::uint64_t>(b);
    r += static_cast<std::uint64_t>(t[2] - t[1] - 1);
    return static_cast<std::size_t>(r);
}

/// Total correlation of every node triple, in canonical order. Work is split
/// over the leading node; output order does not depend on `threads`.
inline TriangleWeights all_triangle_weights(const NodeSeriesSet& in, const TcOptions& opt = {}, unsigned threads = 1)
{
    const int n = static_cast<int>(in.series.rows());
    detail::require_samples(in.series, 3);
    TriangleWeights out;
    const auto total = static_cast<std::size_t>(n_choose_3(static_cast<std::uint64_t>(n)));
    out.triples.reserve(total);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) out.triples.push_back({i, j, k});
    out.weights.resize(static_cast<Eigen::Index>(total));

    std::vector<std::size_t> offset(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i)
        offset[static_cast<std::size_t>(i) + 1] =
            offset[static_cast<std::size_t>(i)] + n_choose_2(static_cast<std::uint64_t>(n - 1 - i));

    Eigen::MatrixXd cov;
    std::vector<std::vector<int>> labels;
    if (opt.estimator == TcEstimator::Gaussian) {
        const Eigen::MatrixXd c = in.series.colwise() - in.series.rowwise().mean();
        cov = (c * c.transpose()) / static_cast<double>(in.series.cols() - 1);
    } else {
        if (opt.bins < 1) throw ConfigError("bin count must be positive");
        for (int i = 0; i < n; ++i) labels.push_back(detail::bin_labels(in.series.row(i).transpose(), opt.bins));
    }

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        std::size_t pos = offset[ii];
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k, ++pos) {
                try {
                    double w;
                    if (opt.estimator == TcEstimator::Gaussian) {
                        const std::array<int, 3> ix{i, j, k};
                        Eigen::Matrix3d c3;
                        for (int a = 0; a < 3; ++a)
                            for (int b = 0; b < 3; ++b) c3(a, b) = cov(ix[a], ix[b]);
                        w = detail::gaussian_tc_from_cov(c3);
                    } else {
                        w = detail::binned_tc(labels[ii], labels[static_cast<std::size_t>(j)],
                                              labels[static_cast<std::size_t>(k)], opt.bins);
                    }
                    out.weights(static_cast<Eigen::Index>(pos)) = w;
                } catch (const DegenerateCovariance& ex) {
                    throw DegenerateCovariance("triple " + to_string(Triangle{i, j, k}) + ": " + ex.what());
                }
            }
    });
    return out;
}

/// Z-scores each subject's weight vector over all its triples, then averages
/// element-wise across subjects.
inline TriangleWeights zscore_and_average_weights(const std::vector<TriangleWeights>& subjects)
{
    if (subjects.empty()) throw EmptyInput("no subjects to average");
    TriangleWeights out{subjects.front().triples, Eigen::VectorXd::Zero(subjects.front().weights.size())};
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        const auto& w = subjects[s].weights;
        if (subjects[s].triples != out.triples || w.size() != out.weights.size())
            throw DimensionMismatch("subject " + std::to_string(s) + " has a different triple list");
        if (w.size() < 2) throw ZeroVariance("subject " + std::to_string(s) + " has fewer than two weights");
        const double mean = w.mean();
        const double sd = std::sqrt((w.array() - mean).square().sum() / static_cast<double>(w.size() - 1));
        if (!(sd > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff())))
            throw ZeroVariance("subject " + std::to_string(s) + " has constant triangle weights");
        out.weights.array() += (w.array() - mean) / sd;
    }
    out.weights /= static_cast<double>(subjects.size());
    return out;
}

/// The `count` largest-weight triples, by decreasing weight, ties lexicographic.
inline std::vector<Triangle> select_top_triangles(const TriangleWeights& w, std::size_t count)
{
    if (count > w.triples.size())
        throw ConfigError("requested " + std::to_string(count) + " triangles but only " +
                          std::to_string(w.triples.size()) + " exist");
    std::vector<std::size_t> order(w.triples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double wa = w.weights(static_cast<Eigen::Index>(a));
        const double wb = w.weights(static_cast<Eigen::Index>(b));
        if (wa != wb) return wa > wb;
        return w.triples[a] < w.triples[b];
    });
    std::vector<Triangle> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) out.push_back(w.triples[order[r]]);
    return out;
}

/// Edge (i,j) at sample m carries |z_i(m) * z_j(m)|.
inline SignalMatrix cofluctuation_edge_signals(const NodeSeriesSet& z, const std::vector<Edge>& edges)
{
    SignalMatrix s{Eigen::MatrixXd(static_cast<Eigen::Index>(edges.size()), z.series.cols()), 1};
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        if (i < 0 || j < 0 || i >= z.series.rows() || j >= z.series.rows())
            throw IndexOutOfRange("edge " + to_string(edges[e]) + " outside the node range");
        s.values.row(static_cast<Eigen::Index>(e)) = (z.series.row(i).array() * z.series.row(j).array()).abs();
    }
    return s;
}

/// Element-wise mean of per-subject z-scored series (the group-level node signals).
inline NodeSeriesSet mean_zscored_series(const std::vector<NodeSeriesSet>& subjects)
{
    if (subjects.empty()) throw EmptyInput("no subjects");
    NodeSeriesSet out{Eigen::MatrixXd::Zero(subjects.front().series.rows(), subjects.front().series.cols()), "mean"};
    for (const auto& s : subjects) {
        if (s.series.rows() != out.series.rows() || s.series.cols() != out.series.cols())
            throw DimensionMismatch("subject '" + s.subject_id + "' has a different shape");
        out.series += zscore(s).series;
    }
    out.series /= static_cast<double>(subjects.size());
    return out;
}

struct StatisticalConfig {
    double edge_fraction = 0.05;
    std::size_t triangle_count = 200;
    TcOptions tc;
    bool signed_correlation = false;
    unsigned threads = 1;
};

struct StatisticalResult {
    OrientedComplex complex;
    std::vector<Edge> skeleton_edges;      // top-correlation edges before closure
    std::vector<Triangle> top_triangles;   // by decreasing mean z-scored weight
    Eigen::MatrixXd mean_correlation;
    TriangleWeights mean_weights;
};

/// Full statistical pipeline: average |Pearson| over subjects and threshold,
/// z-score each subject's triangle weights and average them, keep the
/// strongest triangles, then close the edge set under inclusion.
inline StatisticalResult learn_statistical(const std::vector<NodeSeriesSet>& subjects, const StatisticalConfig& cfg)
{
    if (subjects.empty()) throw EmptyInput("no subjects");
    const auto n = subjects.front().series.rows();
    for (const auto& s : subjects)
        if (s.series.rows() != n)
            throw DimensionMismatch("subject '" + s.subject_id + "' has " + std::to_string(s.series.rows()) +
                                    " nodes, expected " + std::to_string(n));

    StatisticalResult res;
    res.mean_correlation = Eigen::MatrixXd::Zero(n, n);
    for (const auto& s : subjects) res.mean_correlation += pearson_abs_matrix(s, cfg.signed_correlation);
    res.mean_correlation /= static_cast<double>(subjects.size());
    res.skeleton_edges = select_top_edges(res.mean_correlation, cfg.edge_fraction);

    if (cfg.triangle_count > 0) {
        std::vector<TriangleWeights> per_subject;
        per_subject.reserve(subjects.size());
        for (const auto& s : subjects) per_subject.push_back(all_triangle_weights(zscore(s), cfg.tc, cfg.threads));
        res.mean_weights = zscore_and_average_weights(per_subject);
        res.top_triangles = select_top_triangles(res.mean_weights, cfg.triangle_count);
    }
    auto edges = close_under_inclusion(res.skeleton_edges, res.top_triangles);
    res.complex = build_complex(static_cast<int>(n), std::move(edges), res.top_triangles);
    return res;
}

}  // namespace tsp
