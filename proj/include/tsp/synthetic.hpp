#pragma once

// Seeded ground-truth complexes and edge signals.
//
// Random streams come from xoshiro256** (Blackman & Vigna) seeded by
// expanding the 64-bit seed with SplitMix64. Uniform doubles take the top 53
// bits of a draw; standard normals use the Box-Muller cosine branch, consuming
// two uniforms each. The generators draw in a fixed documented order, so a
// port that reproduces these three primitives reproduces every stream.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "errors.hpp"
#include "hodge.hpp"

namespace tsp {

class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed)
    {
        for (auto& word : s_) {
            seed += 0x9E3779B97F4A7C15ULL;  // SplitMix64
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal()
    {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n) by rejection, unbiased.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do x = next();
        while (x >= limit);
        return x % n;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

/// Erdos-Renyi skeleton (pairs visited lexicographically, one uniform each),
/// then every 3-clique, in canonical order, filled with probability fill_prob.
inline OrientedComplex gen_complex(int n_nodes, double edge_prob, double fill_prob, std::uint64_t seed)
{
    if (n_nodes < 0) throw ConfigError("node count must be non-negative");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0) || !(fill_prob >= 0.0 && fill_prob <= 1.0))
        throw ConfigError("probabilities must lie in [0, 1]");
    Xoshiro256 rng(seed);
    std::vector<Edge> edges;
    for (int i = 0; i < n_nodes; ++i)
        for (int j = i + 1; j < n_nodes; ++j)
            if (rng.uniform() < edge_prob) edges.push_back({i, j});
    const auto skeleton = build_complex(n_nodes, edges, {});
    std::vector<Triangle> tris;
    for (const auto& t : candidate_triangles(skeleton))
        if (rng.uniform() < fill_prob) tris.push_back(t);
    return build_complex(n_nodes, std::move(edges), std::move(tris));
}

struct SignalSpec {
    double w_grad = 1.0;
    double w_sol = 1.0;
    double w_harm = 1.0;
    Eigen::Index samples = 100;
    double snr_db = std::numeric_limits<double>::infinity();  // infinity: noiseless
    /// Non-zeros per column of the solenoidal / harmonic coefficients; 0 draws
    /// dense Gaussian coefficients, k > 0 places k random-sign unit entries.
    int sol_sparsity = 0;
    int harm_sparsity = 0;
};

struct EdgeSignals {
    Eigen::MatrixXd Y;       // E x M observed signals
    Eigen::MatrixXd S0;      // N x M node potentials (gradient part = B1^T S0)
    Eigen::MatrixXd S2;      // T x M triangle potentials (solenoidal part = B2 S2)
    Eigen::MatrixXd C;       // N_H x M harmonic coefficients (harmonic part = U_H C)
    Eigen::MatrixXd U_H;     // harmonic basis used for C
    double noise_sigma = 0.0;
};

namespace detail {

inline Eigen::MatrixXd draw_coefficients(Xoshiro256& rng, Eigen::Index rows, Eigen::Index cols, int sparsity)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    if (rows == 0) return out;
    if (sparsity <= 0) {
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = rng.normal();
        return out;
    }
    const auto k = std::min<Eigen::Index>(sparsity, rows);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index placed = 0; placed < k;) {
            const auto r = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(rows)));
            if (out(r, c) != 0.0) continue;
            out(r, c) = (rng.next() >> 63) ? -1.0 : 1.0;
            ++placed;
        }
    }
    return out;
}

/// Scales component and coefficients so ||component||_F^2 = weight * M.
inline void scale_component(Eigen::MatrixXd& component, Eigen::MatrixXd& coeffs, double weight, const char* name)
{
    const double energy = component.squaredNorm();
    if (weight > 0.0 && !(energy > 0.0))
        throw ZeroSubspace(std::string("requested a ") + name + " component but that subspace is empty");
    const double f = weight > 0.0 ? std::sqrt(weight * static_cast<double>(component.cols()) / energy) : 0.0;
    component *= f;
    coeffs *= f;
}

}  // namespace detail

/// Y = B1^T S0 + B2 S2 + U_H C + noise with component energies w * M, so the
/// energy shares follow the weights exactly. Noise is white Gaussian with
/// variance set from the noiseless Frobenius energy and snr_db. Draw order:
/// S0, S2, C (each only when its weight is positive), then noise.
inline EdgeSignals gen_edge_signals(const OrientedComplex& cx, const SignalSpec& spec, std::uint64_t seed)
{
    if (spec.w_grad < 0 || spec.w_sol < 0 || spec.w_harm < 0) throw ConfigError("mix weights must be >= 0");
    if (spec.samples < 1) throw ConfigError("need at least one sample");
    const IncidencePair inc = incidence(cx);
    const auto N = inc.n_nodes();
    const auto E = inc.n_edges();
    const auto T = inc.n_triangles();
    const auto M = spec.samples;
    Xoshiro256 rng(seed);

    EdgeSignals out;
    out.S0 = Eigen::MatrixXd::Zero(N, M);
    out.S2 = Eigen::MatrixXd::Zero(T, M);
    Eigen::MatrixXd Xg = Eigen::MatrixXd::Zero(E, M), Xs = Xg, Xh = Xg;

    if (spec.w_grad > 0) {
        out.S0 = detail::draw_coefficients(rng, N, M, 0);
        Xg = inc.b1d().transpose() * out.S0;
        detail::scale_component(Xg, out.S0, spec.w_grad, "gradient");
    }
    if (spec.w_sol > 0) {
        out.S2 = detail::draw_coefficients(rng, T, M, spec.sol_sparsity);
        Xs = inc.b2d() * out.S2;
        detail::scale_component(Xs, out.S2, spec.w_sol, "solenoidal");
    }
    out.U_H = partition_subspaces(inc).harmonic_basis();
    out.C = Eigen::MatrixXd::Zero(out.U_H.cols(), M);
    if (spec.w_harm > 0) {
        out.C = detail::draw_coefficients(rng, out.U_H.cols(), M, spec.harm_sparsity);
        Xh = out.U_H * out.C;
        detail::scale_component(Xh, out.C, spec.w_harm, "harmonic");
    }

    out.Y = Xg + Xs + Xh;
    if (std::isfinite(spec.snr_db) && E > 0) {
        const double noise_energy = out.Y.squaredNorm() * std::pow(10.0, -spec.snr_db / 10.0);
        out.noise_sigma = std::sqrt(noise_energy / static_cast<double>(E * M));
        for (Eigen::Index c = 0; c < M; ++c)
            for (Eigen::Index r = 0; r < E; ++r) out.Y(r, c) += out.noise_sigma * rng.normal();
    }
    return out;
}

struct PlantedSpec {
    int n_nodes = 10;
    double edge_prob = 0.8;
    int n_planted = 5;
    SignalSpec signal{1.0, 0.0, 1.0, 200, 20.0, 0, 2};
};

struct PlantedInstance {
    OrientedComplex complex;  // skeleton plus the planted triangles
    std::vector<Triangle> planted_triangles;
    Eigen::MatrixXd S0;
    Eigen::MatrixXd S2;
    Eigen::MatrixXd C;
    Eigen::MatrixXd Y;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    /// Largest per-column l1 norm of the planted solenoidal / harmonic
    /// spectral coefficients (U_C^T Y_clean, U_H^T Y_clean).
    double sol_l1 = 0.0;
    double harm_l1 = 0.0;
};

/// Dense random skeleton with n_planted pairwise edge-disjoint filled
/// triangles, chosen by a seeded shuffle of the 3-cliques. Edge signals are
/// drawn on the planted complex; by default they are gradient plus a harmonic
/// part that is 2-sparse in the planted harmonic eigenbasis, so the planted
/// triangles are exactly the circulation-free ones.
inline PlantedInstance gen_planted_instance(const PlantedSpec& spec, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::uint64_t sub = rng.next();
        const auto skeleton = gen_complex(spec.n_nodes, spec.edge_prob, 0.0, sub);
        auto cands = candidate_triangles(skeleton);
        for (std::size_t i = cands.size(); i > 1; --i) std::swap(cands[i - 1], cands[rng.below(i)]);
        std::vector<Triangle> planted;
        std::vector<Edge> used;
        for (const auto& t : cands) {
            if (static_cast<int>(planted.size()) == spec.n_planted) break;
            const auto fs = faces(t);
            bool clash = false;
            for (const auto& f : fs)
                if (std::find(used.begin(), used.end(), f) != used.end()) clash = true;
            if (clash) continue;
            planted.push_back(t);
            used.insert(used.end(), fs.begin(), fs.end());
        }
        if (static_cast<int>(planted.size()) < spec.n_planted) continue;

        PlantedInstance inst;
        inst.complex = build_complex(spec.n_nodes, skeleton.edges(), planted);
        inst.planted_triangles = inst.complex.triangles();
        inst.seed = seed;
        inst.snr_db = spec.signal.snr_db;
        auto sig = gen_edge_signals(inst.complex, spec.signal, rng.next());
        inst.S0 = std::move(sig.S0);
        inst.S2 = std::move(sig.S2);
        inst.C = std::move(sig.C);
        inst.Y = std::move(sig.Y);

        const auto part = partition_subspaces(incidence(inst.complex));
        const Eigen::MatrixXd clean_sol = incidence(inst.complex).b2d() * inst.S2;
        const Eigen::MatrixXd clean_harm = sig.U_H * inst.C;
        const Eigen::MatrixXd cs = part.curl_basis().transpose() * clean_sol;
        const Eigen::MatrixXd ch = part.harmonic_basis().transpose() * clean_harm;
        inst.sol_l1 = cs.size() ? cs.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
        inst.harm_l1 = ch.size() ? ch.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
        return inst;
    }
    throw ConfigError("could not place " + std::to_string(spec.n_planted) +
                      " edge-disjoint triangles on a skeleton with these parameters");
}

}  // namespace tsp
