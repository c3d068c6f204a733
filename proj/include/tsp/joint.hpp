#pragma once

// Joint learning of filled triangles and sparse solenoidal/harmonic spectral
// coefficients from observed edge flows.
//
// For every candidate count q the q triangles with the smallest circulation
// energy a_n = ||Y_sH^T b_n||^2 are filled (closed form of the topology step).
// The curl and harmonic eigenbases of the resulting Laplacian then feed an
// l1-constrained least-squares fit whose residual is g(q). The learned
// complex is the one at q* = argmin g(q).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "errors.hpp"
#include "hodge.hpp"
#include "parallel.hpp"

namespace tsp {

struct SolverSettings {
    double tolerance = 1e-8;  // relative objective change
    int max_iterations = 5000;
    bool record_history = false;
};

struct JointLearnConfig {
    double alpha1 = 1e3;  // l1 budget per column, solenoidal coefficients
    double alpha2 = 1e3;  // l1 budget per column, harmonic coefficients
    /// Data-fit weight of the joint objective. The alternating scheme fixes it
    /// to zero in the topology step and fits data separately, so it has no
    /// numeric effect.
    double beta = 1.0;
    double presence_threshold = 0.05;  // fraction of ||Y||_F
    std::vector<int> q_grid;           // empty: every q in 1..T
    int coarse_step = 0;               // > 1: coarse grid plus local refinement
    std::optional<double> zero_tol;
    SolverSettings solver;
    unsigned threads = 1;

    void validate() const
    {
        if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw ConfigError("alpha1 and alpha2 must be positive");
        if (!(presence_threshold >= 0.0 && presence_threshold < 1.0))
            throw ConfigError("presence_threshold must lie in [0, 1)");
        if (!(solver.tolerance > 0.0) || solver.max_iterations < 1)
            throw ConfigError("solver tolerance must be positive and max_iterations >= 1");
        for (int q : q_grid)
            if (q < 1) throw ConfigError("q_grid entries must be >= 1");
        if (coarse_step < 0) throw ConfigError("coarse_step must be non-negative");
    }
};

/// (I - U_G U_G^T) Y: removes the irrotational component of every column.
inline Eigen::MatrixXd project_off_gradient(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& U_G)
{
    if (U_G.rows() != Y.rows())
        throw DimensionMismatch("gradient basis has " + std::to_string(U_G.rows()) + " rows, signals have " +
                                std::to_string(Y.rows()));
    return Y - U_G * (U_G.transpose() * Y);
}

/// True when the non-gradient energy is a meaningful share of the data:
/// ||Y_sH||_F > threshold * ||Y||_F.
inline bool solenoidal_presence(const Eigen::MatrixXd& Y_sH, const Eigen::MatrixXd& Y, double threshold)
{
    if (Y_sH.rows() != Y.rows() || Y_sH.cols() != Y.cols()) throw DimensionMismatch("solenoidal_presence shapes");
    return Y_sH.norm() > threshold * Y.norm();
}

/// a_n = ||Y_sH^T b_n||^2 for every candidate boundary column b_n.
inline Eigen::VectorXd triangle_scores(const Eigen::MatrixXd& Y_sH, const Eigen::MatrixXd& boundaries)
{
    if (boundaries.cols() == 0) throw EmptyInput("no candidate triangles to score");
    if (boundaries.rows() != Y_sH.rows()) throw DimensionMismatch("boundary columns and signals differ in E");
    return (boundaries.transpose() * Y_sH).rowwise().squaredNorm();
}

namespace detail {

/// Candidate positions ordered by increasing score, ties by position.
inline std::vector<std::size_t> ascending_order(const Eigen::VectorXd& scores)
{
    std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) < scores(static_cast<Eigen::Index>(b));
    });
    return order;
}

}  // namespace detail

/// Positions of the q smallest scores (ties to the lower position), ascending.
inline std::vector<std::size_t> select_q_lowest(const Eigen::VectorXd& scores, std::size_t q)
{
    if (q > static_cast<std::size_t>(scores.size()))
        throw ConfigError("q=" + std::to_string(q) + " exceeds " + std::to_string(scores.size()) + " candidates");
    auto order = detail::ascending_order(scores);
    order.resize(q);
    std::sort(order.begin(), order.end());
    return order;
}

/// Euclidean projection onto {x : ||x||_1 <= radius} by the sort-based
/// threshold search.
inline Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius)
{
    if (radius <= 0.0) return Eigen::VectorXd::Zero(v.size());
    if (v.lpNorm<1>() <= radius) return v;
    std::vector<double> u(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(v(i));
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumsum += u[k];
        const double t = (cumsum - radius) / static_cast<double>(k + 1);
        if (u[k] > t) theta = t;
    }
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::max(0.0, std::abs(v(i)) - theta);
        out(i) = v(i) < 0 ? -mag : mag;
    }
    return out;
}

struct SparseFitResult {
    Eigen::MatrixXd S_s;  // N_C x M solenoidal coefficients
    Eigen::MatrixXd S_H;  // N_H x M harmonic coefficients
    double g = 0.0;       // ||Y_sH - U_C S_s - U_H S_H||_F^2
    bool converged = true;
    int iterations = 0;
    std::vector<double> objective_history;  // objective of each trial step
};

/// Per column, minimizes ||y - U_C s - U_H h||^2 subject to ||s||_1 <= alpha1
/// and ||h||_1 <= alpha2 by projected gradient descent. The step is 1/L with
/// L the largest eigenvalue of the stacked-basis Gram matrix; the constraint
/// is block separable so each gradient step projects the two blocks onto
/// their own l1 balls. Stops once the relative objective change falls below
/// the tolerance. Without convergence the last (best) iterate is returned
/// with converged=false.
inline SparseFitResult sparse_fit(const Eigen::MatrixXd& Y_sH, const Eigen::MatrixXd& U_C, const Eigen::MatrixXd& U_H,
                                  double alpha1, double alpha2, const SolverSettings& solver = {})
{
    const auto E = Y_sH.rows();
    const auto M = Y_sH.cols();
    if ((U_C.cols() && U_C.rows() != E) || (U_H.cols() && U_H.rows() != E))
        throw DimensionMismatch("bases and signals differ in E");
    const auto nc = U_C.cols();
    const auto nh = U_H.cols();
    const auto K = nc + nh;

    SparseFitResult res;
    res.S_s = Eigen::MatrixXd::Zero(nc, M);
    res.S_H = Eigen::MatrixXd::Zero(nh, M);
    if (K == 0) {
        res.g = Y_sH.squaredNorm();
        return res;
    }

    Eigen::MatrixXd D(E, K);
    D << U_C, U_H;
    const Eigen::MatrixXd gram = D.transpose() * D;
    const Eigen::MatrixXd dty = D.transpose() * Y_sH;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("Gram eigensolve failed");
    const double lipschitz = es.eigenvalues().maxCoeff();
    if (!(lipschitz > 0.0)) throw SolverFailure("degenerate basis: Gram matrix is zero");
    const double step = 1.0 / lipschitz;

    // ||y - Dx||^2 = ||y||^2 - 2 x^T D^T y + x^T G x, evaluated per column
    const Eigen::RowVectorXd y_sq = Y_sH.colwise().squaredNorm();
    auto objective = [&](const Eigen::MatrixXd& X) {
        return ((Y_sH - D * X).colwise().squaredNorm()).sum();
    };

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(K, M);
    double f = y_sq.sum();
    res.converged = false;
    for (int it = 1; it <= solver.max_iterations; ++it) {
        Eigen::MatrixXd next = X - step * (gram * X - dty);
        for (Eigen::Index m = 0; m < M; ++m) {
            if (nc) next.col(m).head(nc) = project_l1_ball(next.col(m).head(nc), alpha1);
            if (nh) next.col(m).tail(nh) = project_l1_ball(next.col(m).tail(nh), alpha2);
        }
        const double f_next = objective(next);
        res.iterations = it;
        const double change = std::abs(f - f_next);
        if (f_next <= f) X = std::move(next);
        const bool done = change <= solver.tolerance * std::max(f, std::numeric_limits<double>::min());
        f = std::min(f, f_next);
        if (solver.record_history) res.objective_history.push_back(f_next);
        if (done) {
            res.converged = true;
            break;
        }
    }
    res.S_s = X.topRows(nc);
    res.S_H = X.bottomRows(nh);
    res.g = objective(X);
    return res;
}

struct QTraceEntry {
    int q = 0;
    double g = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index n_curl = 0;
    Eigen::Index n_harmonic = 0;
    bool converged = false;
    int iterations = 0;
    double seconds = 0.0;
    std::string error;  // non-empty when this q failed

    bool ok() const { return error.empty(); }
};

struct JointLearnResult {
    std::vector<Triangle> selected_triangles;  // canonical order
    int q_star = 0;
    bool solenoidal_present = false;
    std::vector<QTraceEntry> trace;          // ascending q
    std::vector<Triangle> candidates;        // 3-cliques of the skeleton
    Eigen::VectorXd scores;                  // a_n per candidate
    std::vector<std::size_t> fill_order;     // candidates by increasing a_n
    Eigen::MatrixXd learned_L1_up;
    Eigen::MatrixXd S_s;
    Eigen::MatrixXd S_H;
    double g_star = std::numeric_limits<double>::quiet_NaN();

    /// g(q) for a scanned q, if present and successful.
    std::optional<double> g_at(int q) const
    {
        for (const auto& t : trace)
            if (t.q == q && t.ok()) return t.g;
        return std::nullopt;
    }
};

namespace detail {

struct QFit {
    HodgeSpectrum spectrum;
    SparseFitResult fit;
};

inline Eigen::MatrixXi selected_boundaries(const Eigen::MatrixXi& cand_b2, const std::vector<std::size_t>& fill_order,
                                           std::size_t q)
{
    std::vector<std::size_t> chosen(fill_order.begin(), fill_order.begin() + static_cast<std::ptrdiff_t>(q));
    std::sort(chosen.begin(), chosen.end());
    Eigen::MatrixXi b2(cand_b2.rows(), static_cast<Eigen::Index>(q));
    for (std::size_t c = 0; c < q; ++c) b2.col(static_cast<Eigen::Index>(c)) = cand_b2.col(static_cast<Eigen::Index>(chosen[c]));
    return b2;
}

inline QFit fit_for_q(const Eigen::MatrixXi& b1, const Eigen::MatrixXi& cand_b2,
                      const std::vector<std::size_t>& fill_order, std::size_t q, const Eigen::MatrixXd& Y_sH,
                      const JointLearnConfig& cfg)
{
    IncidencePair inc{b1, selected_boundaries(cand_b2, fill_order, q)};
    QFit out{partition_subspaces(inc, cfg.zero_tol), {}};
    out.fit = sparse_fit(Y_sH, out.spectrum.curl_basis(), out.spectrum.harmonic_basis(), cfg.alpha1, cfg.alpha2,
                         cfg.solver);
    return out;
}

inline std::vector<int> full_grid(int T)
{
    std::vector<int> g(static_cast<std::size_t>(T));
    std::iota(g.begin(), g.end(), 1);
    return g;
}

}  // namespace detail

/// Learns filled triangles over a given skeleton from edge signals Y (rows in
/// the skeleton's canonical edge order). Any triangles already in `skeleton`
/// are ignored; candidates are its 3-cliques.
inline JointLearnResult learn_joint(const Eigen::MatrixXd& Y, const OrientedComplex& skeleton,
                                    const JointLearnConfig& cfg)
{
    cfg.validate();
    if (Y.rows() != static_cast<Eigen::Index>(skeleton.n_edges()))
        throw DimensionMismatch("edge signals have " + std::to_string(Y.rows()) + " rows but the skeleton has " +
                                std::to_string(skeleton.n_edges()) + " edges");

    JointLearnResult res;
    const auto E = Y.rows();
    const OrientedComplex graph = build_complex(skeleton.n_nodes(), skeleton.edges(), {});
    const IncidencePair base = incidence(graph);
    res.learned_L1_up = Eigen::MatrixXd::Zero(E, E);

    const Eigen::MatrixXd U_G = partition_subspaces(base, cfg.zero_tol).gradient_basis();
    const Eigen::MatrixXd Y_sH = project_off_gradient(Y, U_G);
    res.solenoidal_present = solenoidal_presence(Y_sH, Y, cfg.presence_threshold);

    res.candidates = candidate_triangles(graph);
    const auto T = static_cast<int>(res.candidates.size());
    if (!res.solenoidal_present || T == 0) return res;

    Eigen::MatrixXi cand_b2(E, T);
    for (int n = 0; n < T; ++n) cand_b2.col(n) = boundary_column(graph, res.candidates[static_cast<std::size_t>(n)]);
    res.scores = triangle_scores(Y_sH, cand_b2.cast<double>());
    res.fill_order = detail::ascending_order(res.scores);

    auto evaluate = [&](const std::vector<int>& grid) {
        std::vector<QTraceEntry> entries(grid.size());
        parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
            auto& entry = entries[i];
            entry.q = grid[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto r = detail::fit_for_q(base.b1, cand_b2, res.fill_order, static_cast<std::size_t>(grid[i]),
                                                 Y_sH, cfg);
                const auto d = r.spectrum.dims();
                entry.g = r.fit.g;
                entry.n_curl = d.curl;
                entry.n_harmonic = d.harmonic;
                entry.converged = r.fit.converged;
                entry.iterations = r.fit.iterations;
            } catch (const Error& ex) {
                entry.error = ex.what();
            }
            entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        });
        return entries;
    };

    auto merge = [&](std::vector<QTraceEntry> more) {
        for (auto& e : more) {
            auto it = std::find_if(res.trace.begin(), res.trace.end(), [&](const QTraceEntry& t) { return t.q == e.q; });
            if (it == res.trace.end()) res.trace.push_back(std::move(e));
        }
        std::sort(res.trace.begin(), res.trace.end(), [](const auto& a, const auto& b) { return a.q < b.q; });
    };

    auto best = [&]() -> const QTraceEntry* {
        const QTraceEntry* b = nullptr;
        for (const auto& t : res.trace)
            if (t.ok() && (!b || t.g < b->g)) b = &t;
        return b;
    };

    std::vector<int> grid;
    if (!cfg.q_grid.empty()) {
        for (int q : cfg.q_grid)
            if (q <= T) grid.push_back(q);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        if (grid.empty()) throw ConfigError("no q_grid entry lies within 1.." + std::to_string(T));
        merge(evaluate(grid));
    } else if (cfg.coarse_step > 1) {
        for (int q = 1; q <= T; q += cfg.coarse_step) grid.push_back(q);
        if (grid.back() != T) grid.push_back(T);
        merge(evaluate(grid));
        if (const auto* b = best()) {
            std::vector<int> fine;
            for (int q = std::max(1, b->q - cfg.coarse_step + 1); q <= std::min(T, b->q + cfg.coarse_step - 1); ++q)
                fine.push_back(q);
            merge(evaluate(fine));
        }
    } else {
        merge(evaluate(detail::full_grid(T)));
    }

    const QTraceEntry* b = best();
    if (!b) throw SolverFailure("every scanned q failed; first error: " + res.trace.front().error);
    res.q_star = b->q;
    res.g_star = b->g;

    const auto q = static_cast<std::size_t>(res.q_star);
    const auto final_fit = detail::fit_for_q(base.b1, cand_b2, res.fill_order, q, Y_sH, cfg);
    res.S_s = final_fit.fit.S_s;
    res.S_H = final_fit.fit.S_H;
    const Eigen::MatrixXi b2 = detail::selected_boundaries(cand_b2, res.fill_order, q);
    res.learned_L1_up = (b2 * b2.transpose()).cast<double>();
    for (std::size_t i = 0; i < q; ++i) res.selected_triangles.push_back(res.candidates[res.fill_order[i]]);
    std::sort(res.selected_triangles.begin(), res.selected_triangles.end());
    return res;
}

}  // namespace tsp
