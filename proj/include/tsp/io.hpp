#pragma once

// File formats:
//   complex JSON   {"n_nodes": N, "edges": [[i,j],...], "triangles": [[i,j,k],...]}
//   matrix CSV     one row per simplex (canonical order), one column per sample.
//                  A first row containing any non-numeric token is a header.
// Doubles are written in shortest round-trip form so outputs are byte-stable.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "complex.hpp"
#include "errors.hpp"

namespace tsp::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// FNV-1a over raw bytes; used for input fingerprints in provenance blocks.
inline std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return s;
}

/// Indented JSON where arrays of scalars stay on one line.
inline void pretty_into(std::string& out, const json& j, int depth)
{
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (const auto& [k, v] : j.items()) {
            out += inner + json(k).dump() + ": ";
            pretty_into(out, v, depth + 1);
            out += ++i < j.size() ? ",\n" : "\n";
        }
        out += pad + "}";
    } else if (j.is_array()) {
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
        if (flat) {
            out += j.dump(-1, ' ', false, json::error_handler_t::strict);
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += inner;
            pretty_into(out, j[i], depth + 1);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += pad + "]";
    } else {
        out += j.dump();
    }
}

inline std::string pretty(const json& j)
{
    std::string out;
    pretty_into(out, j, 0);
    return out + "\n";
}

// ---------------------------------------------------------------- complex

inline json complex_to_json(const OrientedComplex& cx)
{
    json j;
    j["n_nodes"] = cx.n_nodes();
    json edges = json::array();
    for (const auto& e : cx.edges()) edges.push_back({e[0], e[1]});
    json tris = json::array();
    for (const auto& t : cx.triangles()) tris.push_back({t[0], t[1], t[2]});
    j["edges"] = std::move(edges);
    j["triangles"] = std::move(tris);
    return j;
}

inline OrientedComplex complex_from_json(const json& j)
{
    try {
        const int n = j.at("n_nodes").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (e.size() != 2) throw ParseError("edge entries must have two nodes");
            edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
        std::vector<Triangle> tris;
        if (j.contains("triangles")) {
            for (const auto& t : j.at("triangles")) {
                if (t.size() != 3) throw ParseError("triangle entries must have three nodes");
                tris.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
            }
        }
        return build_complex(n, std::move(edges), std::move(tris));
    } catch (const json::exception& ex) {
        throw ParseError(std::string("malformed complex JSON: ") + ex.what());
    }
}

inline OrientedComplex load_complex(const std::string& path)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& ex) {
        throw ParseError("'" + path + "': " + ex.what());
    }
    return complex_from_json(j);
}

inline void save_complex(const std::string& path, const OrientedComplex& cx)
{
    write_text(path, pretty(complex_to_json(cx)));
}

// ---------------------------------------------------------------- CSV

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        auto tok = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
        while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
            tok.remove_suffix(1);
        out.push_back(tok);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_number(std::string_view tok, double& v)
{
    if (tok.empty()) return false;
    if (tok.front() == '+') tok.remove_prefix(1);
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

}  // namespace detail

inline Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& origin)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto toks = detail::split_csv_line(line);
        std::vector<double> row(toks.size());
        bool numeric = true;
        for (std::size_t c = 0; c < toks.size(); ++c)
            if (!detail::parse_number(toks[c], row[c])) numeric = false;
        for (std::size_t c = 0; numeric && c < toks.size(); ++c)
            if (!std::isfinite(row[c]))
                throw ParseError(origin + ":" + std::to_string(lineno) + ": non-finite value '" + std::string(toks[c]) + "'");
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw ParseError(origin + ":" + std::to_string(lineno) + ": non-numeric value");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    const auto R = static_cast<Eigen::Index>(rows.size());
    const auto C = R ? static_cast<Eigen::Index>(rows.front().size()) : 0;
    Eigen::MatrixXd m(R, C);
    for (Eigen::Index r = 0; r < R; ++r)
        for (Eigen::Index c = 0; c < C; ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

inline Eigen::MatrixXd load_matrix_csv(const std::string& path)
{
    return parse_matrix_csv(read_text(path), path);
}

/// With header=true a first row "t0,t1,..." labels the sample columns.
inline std::string format_matrix_csv(const Eigen::MatrixXd& m, bool header = false)
{
    std::string out;
    if (header) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += 't' + std::to_string(c);
        }
        out += '\n';
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

inline void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m, bool header = false)
{
    write_text(path, format_matrix_csv(m, header));
}

inline void save_vector_csv(const std::string& path, const Eigen::VectorXd& v)
{
    save_matrix_csv(path, Eigen::MatrixXd(v));
}

}  // namespace tsp::io
