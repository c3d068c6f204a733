#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include <tsp/io.hpp>

#include "oracles.hpp"

using namespace tsp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "tsp_test_io";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip)
{
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(3.0), "3");
    EXPECT_EQ(io::format_double(-2.5e-300), "-2.5e-300");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        EXPECT_EQ(std::stod(io::format_double(v)), v);
    }
}

TEST(MatrixCsv, RoundTripIsExact)
{
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd m = oracle::gaussian_matrix(rng, 7, 5);
    for (bool header : {false, true}) {
        const auto back = io::parse_matrix_csv(io::format_matrix_csv(m, header), "mem");
        EXPECT_TRUE((back.array() == m.array()).all());
    }
    const auto p = scratch("m.csv");
    io::save_matrix_csv(p.string(), m);
    EXPECT_TRUE((io::load_matrix_csv(p.string()).array() == m.array()).all());
}

TEST(MatrixCsv, HeaderOnlyOnFirstRow)
{
    const auto m = io::parse_matrix_csv("a,b\n1,2\n3, 4\r\n\n", "mem");
    ASSERT_EQ(m.rows(), 2);
    EXPECT_EQ(m(1, 1), 4.0);
    EXPECT_THROW(io::parse_matrix_csv("1,2\nx,4\n", "mem"), ParseError);
    EXPECT_THROW(io::parse_matrix_csv("1,2\n3\n", "mem"), ParseError);
    EXPECT_EQ(io::parse_matrix_csv("+1e3,-2\n", "mem")(0, 0), 1000.0);
    EXPECT_THROW(io::parse_matrix_csv("1,inf\n", "mem"), ParseError);
    EXPECT_THROW(io::parse_matrix_csv("h1,h2\nnan,1\n", "mem"), ParseError);
}

TEST(MatrixCsv, MissingFile)
{
    EXPECT_THROW(io::load_matrix_csv("/nonexistent/nowhere.csv"), IoError);
}

TEST(ComplexJson, RoundTrip)
{
    std::mt19937_64 rng(3);
    const auto rc = oracle::random_complex(rng, 9, 0.5, 0.5);
    const auto p = scratch("c.json");
    io::save_complex(p.string(), rc.cx);
    EXPECT_EQ(io::load_complex(p.string()), rc.cx);
}

TEST(ComplexJson, ExtraKeysIgnoredAndErrorsClassified)
{
    const auto j = io::json::parse(R"({"schema_version":1,"n_nodes":3,"edges":[[0,1],[1,2],[0,2]],
                                       "triangles":[[2,1,0]],"provenance":{}})");
    const auto cx = io::complex_from_json(j);
    EXPECT_EQ(cx, oracle::filled_triangle());
    EXPECT_THROW(io::complex_from_json(io::json::parse(R"({"edges":[]})")), ParseError);
    EXPECT_THROW(io::complex_from_json(io::json::parse(R"({"n_nodes":3,"edges":[[0,1,2]]})")), ParseError);
    EXPECT_THROW(io::complex_from_json(io::json::parse(R"({"n_nodes":3,"edges":[[0,1]],"triangles":[[0,1,2]]})")),
                 InclusionViolation);
    const auto bad = scratch("bad.json");
    io::write_text(bad.string(), "{not json");
    EXPECT_THROW(io::load_complex(bad.string()), ParseError);
}

TEST(PrettyJson, ScalarArraysInline)
{
    io::json j;
    j["a"] = {1, 2};
    j["b"] = io::json::array({io::json::array({0, 1})});
    j["c"] = io::json::object();
    EXPECT_EQ(io::pretty(j), "{\n  \"a\": [1,2],\n  \"b\": [\n    [0,1]\n  ],\n  \"c\": {}\n}\n");
    EXPECT_EQ(io::json::parse(io::pretty(j)), j);
}

TEST(Fnv1a, KnownVectors)
{
    EXPECT_EQ(io::fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(io::hex64(io::fnv1a("a")), "af63dc4c8601ec8c");
}
