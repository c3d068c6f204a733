#pragma once

// Oriented 2-order simplicial complexes and their incidence matrices.
//
// Orientation convention: every simplex is oriented by increasing node index.
// Edge (i,j) with i<j points i -> j, so B1(i,e) = -1 and B1(j,e) = +1.
// Triangle (i,j,k) with i<j<k has boundary +(i,j) - (i,k) + (j,k).
// Edge and triangle lists are kept in lexicographic order; that order defines
// the column order of B1 and B2 and every downstream signal row.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace tsp {

using Edge = std::array<int, 2>;
using Triangle = std::array<int, 3>;

inline std::string to_string(const Edge& e)
{
    return "(" + std::to_string(e[0]) + "," + std::to_string(e[1]) + ")";
}

inline std::string to_string(const Triangle& t)
{
    return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
           std::to_string(t[2]) + ")";
}

/// The three faces of a canonical triangle, in the order (i,j), (i,k), (j,k).
inline std::array<Edge, 3> faces(const Triangle& t)
{
    return {Edge{t[0], t[1]}, Edge{t[0], t[2]}, Edge{t[1], t[2]}};
}

/// Boundary signs matching faces(): +(i,j) -(i,k) +(j,k).
inline constexpr std::array<int, 3> kFaceSigns{+1, -1, +1};

namespace detail {

template <std::size_t K>
std::array<int, K> canonical(std::array<int, K> s, int n_nodes)
{
    std::sort(s.begin(), s.end());
    for (std::size_t a = 0; a < K; ++a) {
        if (s[a] < 0 || (n_nodes >= 0 && s[a] >= n_nodes)) {
            std::ostringstream msg;
            msg << "node index " << s[a] << " outside [0, " << n_nodes << ")";
            throw IndexOutOfRange(msg.str());
        }
        if (a > 0 && s[a] == s[a - 1])
            throw IndexOutOfRange("simplex has repeated node " + std::to_string(s[a]));
    }
    return s;
}

template <typename T>
void sort_unique(std::vector<T>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

/// Node, edge and triangle sets of a 2-order complex in canonical order.
/// Immutable once built; construct through build_complex().
class OrientedComplex {
public:
    OrientedComplex() = default;

    int n_nodes() const noexcept { return n_nodes_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }
    std::size_t n_triangles() const noexcept { return triangles_.size(); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

    std::optional<std::size_t> edge_index(const Edge& e) const
    {
        auto it = edge_index_.find(e);
        if (it == edge_index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::size_t> triangle_index(const Triangle& t) const
    {
        auto it = triangle_index_.find(t);
        if (it == triangle_index_.end()) return std::nullopt;
        return it->second;
    }

    bool has_edge(int i, int j) const
    {
        if (i > j) std::swap(i, j);
        return edge_index_.count(Edge{i, j}) != 0;
    }

    bool operator==(const OrientedComplex& o) const
    {
        return n_nodes_ == o.n_nodes_ && edges_ == o.edges_ && triangles_ == o.triangles_;
    }

private:
    friend OrientedComplex build_complex(int, std::vector<Edge>, std::vector<Triangle>);

    int n_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<Triangle> triangles_;
    std::map<Edge, std::size_t> edge_index_;
    std::map<Triangle, std::size_t> triangle_index_;
};

/// Canonicalizes and validates a complex. Member order inside each simplex is
/// irrelevant; duplicates are dropped. Throws IndexOutOfRange for bad nodes
/// and InclusionViolation listing every triangle with a missing face.
inline OrientedComplex build_complex(int n_nodes, std::vector<Edge> edges,
                                     std::vector<Triangle> triangles)
{
    if (n_nodes < 0) throw IndexOutOfRange("negative node count");
    for (auto& e : edges) e = detail::canonical(e, n_nodes);
    for (auto& t : triangles) t = detail::canonical(t, n_nodes);
    detail::sort_unique(edges);
    detail::sort_unique(triangles);

    OrientedComplex cx;
    cx.n_nodes_ = n_nodes;
    cx.edges_ = std::move(edges);
    cx.triangles_ = std::move(triangles);
    for (std::size_t i = 0; i < cx.edges_.size(); ++i) cx.edge_index_.emplace(cx.edges_[i], i);

    std::string missing;
    for (std::size_t i = 0; i < cx.triangles_.size(); ++i) {
        const auto& t = cx.triangles_[i];
        for (const auto& f : faces(t)) {
            if (!cx.edge_index_.count(f)) {
                if (!missing.empty()) missing += "; ";
                missing += to_string(t) + " lacks face " + to_string(f);
            }
        }
        cx.triangle_index_.emplace(t, i);
    }
    if (!missing.empty()) throw InclusionViolation("inclusion property violated: " + missing);
    return cx;
}

/// Adds every triangle face not already present. The result is sorted and
/// deduplicated, a superset of the input, and idempotent under reapplication.
inline std::vector<Edge> close_under_inclusion(std::vector<Edge> edges,
                                               const std::vector<Triangle>& triangles)
{
    for (auto& e : edges) e = detail::canonical(e, -1);
    for (const auto& t : triangles)
        for (const auto& f : faces(detail::canonical(t, -1))) edges.push_back(f);
    detail::sort_unique(edges);
    return edges;
}

/// Signed incidence matrices. b1 is N x E, b2 is E x T.
struct IncidencePair {
    Eigen::MatrixXi b1;
    Eigen::MatrixXi b2;

    Eigen::Index n_nodes() const { return b1.rows(); }
    Eigen::Index n_edges() const { return b1.cols(); }
    Eigen::Index n_triangles() const { return b2.cols(); }

    Eigen::MatrixXd b1d() const { return b1.cast<double>(); }
    Eigen::MatrixXd b2d() const { return b2.cast<double>(); }
};

/// Boundary column of a triangle over the complex's edge ordering.
inline Eigen::VectorXi boundary_column(const OrientedComplex& cx, const Triangle& t)
{
    Eigen::VectorXi col = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(cx.n_edges()));
    const auto fs = faces(t);
    for (int a = 0; a < 3; ++a) {
        auto idx = cx.edge_index(fs[a]);
        if (!idx) throw InclusionViolation(to_string(t) + " lacks face " + to_string(fs[a]));
        col(static_cast<Eigen::Index>(*idx)) = kFaceSigns[a];
    }
    return col;
}

inline IncidencePair incidence(const OrientedComplex& cx)
{
    const auto N = static_cast<Eigen::Index>(cx.n_nodes());
    const auto E = static_cast<Eigen::Index>(cx.n_edges());
    const auto T = static_cast<Eigen::Index>(cx.n_triangles());
    IncidencePair inc{Eigen::MatrixXi::Zero(N, E), Eigen::MatrixXi::Zero(E, T)};
    for (Eigen::Index e = 0; e < E; ++e) {
        const auto& edge = cx.edges()[static_cast<std::size_t>(e)];
        inc.b1(edge[0], e) = -1;
        inc.b1(edge[1], e) = +1;
    }
    for (Eigen::Index t = 0; t < T; ++t)
        inc.b2.col(t) = boundary_column(cx, cx.triangles()[static_cast<std::size_t>(t)]);

    // Boundary of a boundary vanishes; anything else means corrupt indexing.
    if (E > 0 && T > 0 && (inc.b1 * inc.b2).cwiseAbs().maxCoeff() != 0)
        throw InclusionViolation("B1*B2 != 0: inconsistent orientation");
    return inc;
}

/// All node triples whose three faces are edges of the complex (the 3-cliques
/// of the 1-skeleton), lexicographically sorted. The triangle set is ignored.
inline std::vector<Triangle> candidate_triangles(const OrientedComplex& cx)
{
    const int n = cx.n_nodes();
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (const auto& e : cx.edges()) nbrs[static_cast<std::size_t>(e[0])].push_back(e[1]);
    std::vector<char> adj(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    for (const auto& e : cx.edges())
        adj[static_cast<std::size_t>(e[0]) * n + e[1]] = 1;

    std::vector<Triangle> out;
    for (int i = 0; i < n; ++i) {
        const auto& up = nbrs[static_cast<std::size_t>(i)];  // sorted, all > i
        for (std::size_t a = 0; a < up.size(); ++a)
            for (std::size_t b = a + 1; b < up.size(); ++b)
                if (adj[static_cast<std::size_t>(up[a]) * n + up[b]])
                    out.push_back({i, up[a], up[b]});
    }
    return out;
}

}  // namespace tsp
