#pragma once

// Hodge Laplacians, spectra, the gradient/curl/harmonic split of edge space,
// the simplicial Fourier transform, and the divergence and curl operators.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complex.hpp"
#include "errors.hpp"

namespace tsp {

struct Laplacians {
    Eigen::MatrixXd L0;      // B1 B1^T
    Eigen::MatrixXd L1_low;  // B1^T B1
    Eigen::MatrixXd L1_up;   // B2 B2^T
    Eigen::MatrixXd L1;      // L1_low + L1_up
};

/// Products are formed in integer arithmetic, so every Laplacian is exactly
/// symmetric with integer entries.
inline Laplacians laplacians(const IncidencePair& inc)
{
    const Eigen::MatrixXi l_low = inc.b1.transpose() * inc.b1;
    const Eigen::MatrixXi l_up = inc.b2 * inc.b2.transpose();
    return {(inc.b1 * inc.b1.transpose()).cast<double>(), l_low.cast<double>(),
            l_up.cast<double>(), (l_low + l_up).cast<double>()};
}

struct SubspaceDims {
    Eigen::Index gradient = 0;
    Eigen::Index curl = 0;
    Eigen::Index harmonic = 0;
};

/// Eigenpairs of a Hodge Laplacian. Eigenvalues ascend; eigenvector columns
/// are orthonormal and sign-normalized (largest-magnitude entry positive).
/// For an order-1 partition grad/curl/harm index sets split the columns;
/// for a plain spectrum only harm_idx is populated.
struct HodgeSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::vector<Eigen::Index> grad_idx;
    std::vector<Eigen::Index> curl_idx;
    std::vector<Eigen::Index> harm_idx;
    double zero_tol = 0.0;

    SubspaceDims dims() const
    {
        return {static_cast<Eigen::Index>(grad_idx.size()), static_cast<Eigen::Index>(curl_idx.size()),
                static_cast<Eigen::Index>(harm_idx.size())};
    }

    Eigen::MatrixXd columns(const std::vector<Eigen::Index>& idx) const
    {
        Eigen::MatrixXd out(eigenvectors.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c)
            out.col(static_cast<Eigen::Index>(c)) = eigenvectors.col(idx[c]);
        return out;
    }

    Eigen::MatrixXd gradient_basis() const { return columns(grad_idx); }
    Eigen::MatrixXd curl_basis() const { return columns(curl_idx); }
    Eigen::MatrixXd harmonic_basis() const { return columns(harm_idx); }
};

/// Scale-relative zero threshold: 1e-8 * max(1, lambda_max).
inline double default_zero_tol(double lambda_max) { return 1e-8 * std::max(1.0, lambda_max); }

namespace detail {

inline void normalize_signs(Eigen::MatrixXd& U)
{
    for (Eigen::Index c = 0; c < U.cols(); ++c) {
        const double peak = U.col(c).cwiseAbs().maxCoeff();
        if (peak == 0.0) continue;
        // first entry within a hair of the peak, so near-ties resolve stably
        Eigen::Index pick = 0;
        while (std::abs(U(pick, c)) < peak * (1.0 - 1e-9)) ++pick;
        if (U(pick, c) < 0) U.col(c) = -U.col(c);
    }
}

struct Eig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

inline Eig symmetric_eig(const Eigen::MatrixXd& L)
{
    if (L.rows() != L.cols())
        throw DimensionMismatch("Laplacian must be square, got " + std::to_string(L.rows()) + "x" +
                                std::to_string(L.cols()));
    if (L.size() == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DimensionMismatch("matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    if (es.info() != Eigen::Success) throw EigenFailure("symmetric eigensolver did not converge");
    Eig out{es.eigenvalues(), es.eigenvectors()};
    normalize_signs(out.vectors);
    return out;
}

inline Eigen::MatrixXd select_columns(const Eig& eig, bool nonzero, double tol, std::vector<double>* values)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if ((eig.values(i) >= tol) == nonzero) keep.push_back(i);
    Eigen::MatrixXd out(eig.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]);
        if (values) values->push_back(nonzero ? eig.values(keep[c]) : 0.0);
    }
    return out;
}

}  // namespace detail

/// Eigendecomposition of a symmetric positive semidefinite matrix. Eigenvalues
/// below zero_tol are reported as 0 and indexed as harmonic. Without an
/// explicit tolerance the scale-relative default is used.
inline HodgeSpectrum spectrum(const Eigen::MatrixXd& L, std::optional<double> zero_tol = std::nullopt)
{
    auto eig = detail::symmetric_eig(L);
    HodgeSpectrum s;
    const double lmax = eig.values.size() ? eig.values.maxCoeff() : 0.0;
    s.zero_tol = zero_tol.value_or(default_zero_tol(lmax));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) < s.zero_tol) {
            if (std::abs(eig.values(i)) < s.zero_tol) eig.values(i) = 0.0;
            s.harm_idx.push_back(i);
        }
    }
    s.eigenvalues = std::move(eig.values);
    s.eigenvectors = std::move(eig.vectors);
    return s;
}

/// Orthonormal basis of ker(L) (eigenvectors with eigenvalue below tol).
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& L, std::optional<double> zero_tol = std::nullopt)
{
    auto eig = detail::symmetric_eig(L);
    const double lmax = eig.values.size() ? eig.values.maxCoeff() : 0.0;
    return detail::select_columns(eig, false, zero_tol.value_or(default_zero_tol(lmax)), nullptr);
}

/// Orthonormal basis of img(L) (eigenvectors with eigenvalue at or above tol).
inline Eigen::MatrixXd range_basis(const Eigen::MatrixXd& L, std::optional<double> zero_tol = std::nullopt)
{
    auto eig = detail::symmetric_eig(L);
    const double lmax = eig.values.size() ? eig.values.maxCoeff() : 0.0;
    return detail::select_columns(eig, true, zero_tol.value_or(default_zero_tol(lmax)), nullptr);
}

/// Order-1 spectrum split into gradient, curl and harmonic eigenvectors.
///
/// Gradient vectors are the non-zero eigenvectors of L1_low, curl vectors the
/// non-zero eigenvectors of L1_up, and harmonic vectors the kernel of L1.
/// Each is also an eigenvector of L1 with the same eigenvalue, so the
/// assembled columns, sorted by eigenvalue, form a full eigenbasis of L1.
inline HodgeSpectrum partition_subspaces(const IncidencePair& inc, std::optional<double> zero_tol = std::nullopt)
{
    const auto lap = laplacians(inc);
    const auto E = lap.L1.rows();
    const auto full = detail::symmetric_eig(lap.L1);
    const double tol = zero_tol.value_or(default_zero_tol(full.values.size() ? full.values.maxCoeff() : 0.0));

    std::vector<double> vals;
    const Eigen::MatrixXd ug = detail::select_columns(detail::symmetric_eig(lap.L1_low), true, tol, &vals);
    const Eigen::MatrixXd uc = detail::select_columns(detail::symmetric_eig(lap.L1_up), true, tol, &vals);
    const Eigen::MatrixXd uh = detail::select_columns(full, false, tol, &vals);
    if (ug.cols() + uc.cols() + uh.cols() != E)
        throw EigenFailure("subspace dimensions " + std::to_string(ug.cols()) + "+" + std::to_string(uc.cols()) +
                           "+" + std::to_string(uh.cols()) + " do not add up to E=" + std::to_string(E) +
                           "; zero tolerance is ill-suited to this spectrum");

    // group: 0 grad, 1 curl, 2 harmonic; order by eigenvalue, then group, then position
    const Eigen::Index n = E;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto group = [&](Eigen::Index c) { return c < ug.cols() ? 0 : (c < ug.cols() + uc.cols() ? 1 : 2); };
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
    });

    HodgeSpectrum s;
    s.zero_tol = tol;
    s.eigenvalues.resize(n);
    s.eigenvectors.resize(E, n);
    for (Eigen::Index pos = 0; pos < n; ++pos) {
        const Eigen::Index c = order[static_cast<std::size_t>(pos)];
        s.eigenvalues(pos) = vals[static_cast<std::size_t>(c)];
        const int g = group(c);
        if (g == 0) {
            s.eigenvectors.col(pos) = ug.col(c);
            s.grad_idx.push_back(pos);
        } else if (g == 1) {
            s.eigenvectors.col(pos) = uc.col(c - ug.cols());
            s.curl_idx.push_back(pos);
        } else {
            s.eigenvectors.col(pos) = uh.col(c - ug.cols() - uc.cols());
            s.harm_idx.push_back(pos);
        }
    }
    return s;
}

namespace detail {
inline void check_len(Eigen::Index got, Eigen::Index want, const char* what)
{
    if (got != want)
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                                std::to_string(got));
}
}  // namespace detail

/// Simplicial Fourier transform: coefficients U^T s.
inline Eigen::VectorXd sft(const HodgeSpectrum& spec, const Eigen::VectorXd& s)
{
    detail::check_len(s.size(), spec.eigenvectors.rows(), "sft");
    return spec.eigenvectors.transpose() * s;
}

inline Eigen::VectorXd inverse_sft(const HodgeSpectrum& spec, const Eigen::VectorXd& coeffs)
{
    detail::check_len(coeffs.size(), spec.eigenvectors.cols(), "inverse_sft");
    return spec.eigenvectors * coeffs;
}

struct HodgeParts {
    Eigen::VectorXd irrotational;
    Eigen::VectorXd solenoidal;
    Eigen::VectorXd harmonic;
};

/// Orthogonal projection onto the gradient and curl subspaces; the harmonic
/// part is the remainder.
inline HodgeParts hodge_decompose(const HodgeSpectrum& spec, const Eigen::VectorXd& s1)
{
    detail::check_len(s1.size(), spec.eigenvectors.rows(), "hodge_decompose");
    const Eigen::MatrixXd ug = spec.gradient_basis();
    const Eigen::MatrixXd uc = spec.curl_basis();
    HodgeParts p;
    p.irrotational = ug * (ug.transpose() * s1);
    p.solenoidal = uc * (uc.transpose() * s1);
    p.harmonic = s1 - p.irrotational - p.solenoidal;
    return p;
}

inline HodgeParts hodge_decompose(const IncidencePair& inc, const Eigen::VectorXd& s1)
{
    return hodge_decompose(partition_subspaces(inc), s1);
}

/// div(s1) = B1 s1. With tail = -1 in B1, a node's entry is its inflow minus
/// its outflow.
inline Eigen::VectorXd divergence(const IncidencePair& inc, const Eigen::VectorXd& s1)
{
    detail::check_len(s1.size(), inc.n_edges(), "divergence");
    return inc.b1d() * s1;
}

/// curl(s1) = B2^T s1: circulation of the flow around each filled triangle.
inline Eigen::VectorXd curl(const IncidencePair& inc, const Eigen::VectorXd& s1)
{
    detail::check_len(s1.size(), inc.n_edges(), "curl");
    return inc.b2d().transpose() * s1;
}

}  // namespace tsp
