#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include <tsp/hodge.hpp>
#include <tsp/io.hpp>

#include "oracles.hpp"

using namespace tsp;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string err;
};

fs::path workdir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / "tsp_test_cli" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Run run(const std::string& args, const fs::path& dir)
{
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string(TSP_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_text(err.string())};
}

void write_series(const fs::path& dir, int subjects, int n, int m, std::uint64_t seed)
{
    fs::create_directories(dir);
    std::mt19937_64 rng(seed);
    for (int s = 0; s < subjects; ++s)
        io::save_matrix_csv((dir / ("subject" + std::to_string(s) + ".csv")).string(), oracle::gaussian_matrix(rng, n, m));
}

}  // namespace

TEST(Cli, AnalyzeFilledTriangleCyclicFlow)
{
    const auto d = workdir("analyze");
    io::save_complex((d / "c.json").string(), oracle::filled_triangle());
    io::write_text((d / "s.csv").string(), "1,1\n-1,-1\n1,1\n");
    const auto r = run("analyze --complex " + (d / "c.json").string() + " --signals " + (d / "s.csv").string() +
                           " --out " + (d / "out").string(),
                       d);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::read_text((d / "out" / "mean_curl.csv").string()), "3\n");
    const auto report = io::json::parse(io::read_text((d / "out" / "report.json").string()));
    EXPECT_EQ(report.at("schema_version"), 1);
    EXPECT_TRUE(report.at("provenance").contains("inputs"));
}

TEST(Cli, MissingInputIsDataError)
{
    const auto d = workdir("missing");
    const auto r = run("decompose --complex " + (d / "nope.json").string() + " --signals x.csv --out " +
                           (d / "out").string(),
                       d);
    EXPECT_EQ(r.code, 2);
    const auto j = io::json::parse(r.err);
    EXPECT_EQ(j.at("error"), "IoError");
    EXPECT_EQ(j.at("exit_code"), 2);
}

TEST(Cli, ConfigErrors)
{
    const auto d = workdir("config");
    EXPECT_EQ(run("gen --out " + (d / "g").string(), d).code, 1);
    io::write_text((d / "cfg.json").string(), R"({"seed": 1, "bogus": 2})");
    const auto r = run("gen --config " + (d / "cfg.json").string() + " --out " + (d / "g").string(), d);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
    EXPECT_EQ(run("gen --seed 1 --nodes abc --out " + (d / "g").string(), d).code, 1);
}

TEST(Cli, FlagsOverrideConfigFile)
{
    const auto d = workdir("override");
    io::write_text((d / "cfg.json").string(), R"({"seed": 4, "nodes": 9, "w_sol": 0, "w_harm": 0})");
    ASSERT_EQ(run("gen --config " + (d / "cfg.json").string() + " --nodes 11 --out " + (d / "g").string(), d).code, 0);
    const auto cx = io::load_complex((d / "g" / "complex.json").string());
    EXPECT_EQ(cx.n_nodes(), 11);
}

TEST(Cli, NonFiniteInputIsParseError)
{
    const auto d = workdir("nonfinite");
    fs::create_directories(d / "in");
    io::write_text((d / "in" / "a.csv").string(), "1,2,3\n4,nan,6\n7,8,10\n");
    const auto r = run("learn-stat --input " + (d / "in").string() + " --out " + (d / "out").string(), d);
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(io::json::parse(r.err).at("error"), "ParseError");
}

TEST(Cli, LearnStatReportsPreClosureEdges)
{
    const auto d = workdir("stat116");
    write_series(d / "in", 2, 116, 12, 6);
    ASSERT_EQ(run("learn-stat --input " + (d / "in").string() + " --out " + (d / "out").string() + " --threads 2", d)
                  .code,
              0);
    const auto j = io::json::parse(io::read_text((d / "out" / "complex.json").string()));
    EXPECT_EQ(j.at("provenance").at("pre_closure_edges"), 333);
    EXPECT_EQ(j.at("triangles").size(), 200u);
    EXPECT_GE(j.at("edges").size(), 333u);
}

TEST(Cli, LearnStatThreadIndependent)
{
    const auto d = workdir("statthreads");
    write_series(d / "in", 3, 15, 40, 7);
    const std::string base = "learn-stat --input " + (d / "in").string() + " --edge-fraction 0.2 --triangles 10";
    ASSERT_EQ(run(base + " --out " + (d / "a").string() + " --threads 1", d).code, 0);
    ASSERT_EQ(run(base + " --out " + (d / "b").string() + " --threads 4", d).code, 0);
    for (const char* f : {"complex.json", "weights.csv", "edge_signals.csv"})
        EXPECT_EQ(io::read_text((d / "a" / f).string()), io::read_text((d / "b" / f).string())) << f;
}

TEST(Cli, DecomposeMatchesLibrary)
{
    const auto d = workdir("decompose");
    std::mt19937_64 rng(8);
    const auto rc = oracle::random_complex(rng, 9, 0.6, 0.5);
    const Eigen::MatrixXd y = oracle::gaussian_matrix(rng, static_cast<Eigen::Index>(rc.cx.n_edges()), 4);
    io::save_complex((d / "c.json").string(), rc.cx);
    io::save_matrix_csv((d / "s.csv").string(), y);
    ASSERT_EQ(run("decompose --complex " + (d / "c.json").string() + " --signals " + (d / "s.csv").string() +
                      " --out " + (d / "out").string(),
                  d)
                  .code,
              0);
    const auto spec = partition_subspaces(incidence(rc.cx));
    const auto sol = io::load_matrix_csv((d / "out" / "solenoidal.csv").string());
    const auto harm = io::load_matrix_csv((d / "out" / "harmonic.csv").string());
    for (Eigen::Index m = 0; m < 4; ++m) {
        const auto p = hodge_decompose(spec, y.col(m));
        EXPECT_TRUE((sol.col(m).array() == p.solenoidal.array()).all());
        EXPECT_TRUE((harm.col(m).array() == p.harmonic.array()).all());
    }
    const auto energy = io::json::parse(io::read_text((d / "out" / "energy.json").string()));
    EXPECT_TRUE(energy.contains("provenance"));
}

TEST(Cli, GenPlantedThenLearnJoint)
{
    const auto d = workdir("joint");
    ASSERT_EQ(run("gen --seed 1000 --planted 5 --nodes 10 --edge-prob 0.8 --w-sol 0 --samples 200 --snr-db 20 "
                  "--harm-sparsity 2 --out " +
                      (d / "g").string(),
                  d)
                  .code,
              0);
    const auto manifest = io::json::parse(io::read_text((d / "g" / "manifest.json").string()));
    const double alpha = 1.5 * manifest.at("planted_harm_l1").get<double>();
    const auto r = run("learn-joint --skeleton " + (d / "g" / "complex.json").string() + " --signals " +
                           (d / "g" / "signals.csv").string() + " --alpha1 " + io::format_double(alpha) +
                           " --alpha2 " + io::format_double(alpha) + " --out " + (d / "j").string(),
                       d);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::load_complex((d / "j" / "complex.json").string()).triangles(),
              io::load_complex((d / "g" / "complex.json").string()).triangles());
    const auto trace = io::read_text((d / "j" / "trace.csv").string());
    EXPECT_EQ(trace.rfind("q,g,", 0), 0u);
}
